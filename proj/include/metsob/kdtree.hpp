#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace metsob {

using Coord = std::array<double, 3>;

// Static kd-tree over a subset of points (2-D or 3-D). Queries use open balls.
class KdTree {
 public:
  KdTree() = default;
  // coords: flat array with stride `dim`, indexed by global point id.
  KdTree(int dim, const std::vector<std::size_t>& ids, const std::vector<double>& coords);

  bool empty() const { return ids_.empty(); }
  std::size_t size() const { return ids_.size(); }

  // Calls f(id, distance) for every point with distance < r (arbitrary order).
  template <class F>
  void radius_search(const Coord& q, double r, F&& f) const {
    if (ids_.empty() || !(r > 0)) return;
    search(0, q, r, r * r, f);
  }

  // Nearest point; ties broken by lowest id. Returns {id, distance}. The point
  // with id `exclude` is skipped.
  std::pair<std::size_t, double> nearest(const Coord& q,
                                         std::size_t exclude = std::numeric_limits<std::size_t>::max()) const;

 private:
  struct Node {
    std::size_t lo, hi;  // range into ids_/pts_
    int left = -1, right = -1;
    std::array<double, 3> bmin{}, bmax{};
  };

  int build(std::size_t lo, std::size_t hi);
  double box_dist2(const Node& n, const Coord& q) const {
    double s = 0;
    for (int d = 0; d < dim_; ++d) {
      double v = 0;
      if (q[d] < n.bmin[d]) v = n.bmin[d] - q[d];
      else if (q[d] > n.bmax[d]) v = q[d] - n.bmax[d];
      s += v * v;
    }
    return s;
  }
  double dist2(std::size_t slot, const Coord& q) const {
    double s = 0;
    for (int d = 0; d < dim_; ++d) {
      const double v = pts_[slot * 3 + d] - q[d];
      s += v * v;
    }
    return s;
  }

  template <class F>
  void search(int node, const Coord& q, double r, double r2, F& f) const {
    const Node& n = nodes_[node];
    if (box_dist2(n, q) >= r2) return;
    if (n.left < 0) {
      for (std::size_t s = n.lo; s < n.hi; ++s) {
        const double d2 = dist2(s, q);
        if (d2 < r2) {
          const double d = std::sqrt(d2);
          if (d < r) f(ids_[s], d);
        }
      }
      return;
    }
    search(n.left, q, r, r2, f);
    search(n.right, q, r, r2, f);
  }

  void nearest_rec(int node, const Coord& q, std::size_t exclude, double& best2, std::size_t& best) const;

  int dim_ = 2;
  std::vector<std::size_t> ids_;
  std::vector<double> pts_;  // stride 3, permuted to match ids_
  std::vector<Node> nodes_;
};

}  // namespace metsob
