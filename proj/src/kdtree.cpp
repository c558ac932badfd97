#include "metsob/kdtree.hpp"

#include <algorithm>
#include <numeric>

namespace metsob {

namespace {
constexpr std::size_t kLeafSize = 16;
}

KdTree::KdTree(int dim, const std::vector<std::size_t>& ids, const std::vector<double>& coords)
    : dim_(dim), ids_(ids) {
  pts_.assign(ids_.size() * 3, 0.0);
  if (ids_.empty()) return;
  nodes_.reserve(2 * ids_.size() / kLeafSize + 2);
  for (std::size_t s = 0; s < ids_.size(); ++s)
    for (int d = 0; d < dim_; ++d) pts_[s * 3 + d] = coords[ids_[s] * dim_ + d];
  build(0, ids_.size());
}

int KdTree::build(std::size_t lo, std::size_t hi) {
  const int idx = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{lo, hi});
  Node n{lo, hi};
  for (int d = 0; d < 3; ++d) {
    n.bmin[d] = std::numeric_limits<double>::infinity();
    n.bmax[d] = -std::numeric_limits<double>::infinity();
  }
  for (std::size_t s = lo; s < hi; ++s)
    for (int d = 0; d < dim_; ++d) {
      n.bmin[d] = std::min(n.bmin[d], pts_[s * 3 + d]);
      n.bmax[d] = std::max(n.bmax[d], pts_[s * 3 + d]);
    }
  if (hi - lo > kLeafSize) {
    int axis = 0;
    double spread = -1;
    for (int d = 0; d < dim_; ++d)
      if (n.bmax[d] - n.bmin[d] > spread) {
        spread = n.bmax[d] - n.bmin[d];
        axis = d;
      }
    const std::size_t mid = lo + (hi - lo) / 2;
    // Sort a slot permutation, then apply it to ids_ and pts_.
    std::vector<std::size_t> slots(hi - lo);
    std::iota(slots.begin(), slots.end(), lo);
    std::nth_element(slots.begin(), slots.begin() + (mid - lo), slots.end(),
                     [&](std::size_t a, std::size_t b) {
                       const double va = pts_[a * 3 + axis], vb = pts_[b * 3 + axis];
                       return va < vb || (va == vb && ids_[a] < ids_[b]);
                     });
    std::vector<std::size_t> new_ids(hi - lo);
    std::vector<double> new_pts((hi - lo) * 3);
    for (std::size_t k = 0; k < slots.size(); ++k) {
      new_ids[k] = ids_[slots[k]];
      for (int d = 0; d < 3; ++d) new_pts[k * 3 + d] = pts_[slots[k] * 3 + d];
    }
    std::copy(new_ids.begin(), new_ids.end(), ids_.begin() + lo);
    std::copy(new_pts.begin(), new_pts.end(), pts_.begin() + lo * 3);
    n.left = build(lo, mid);
    n.right = build(mid, hi);
  }
  nodes_[idx] = n;
  return idx;
}

std::pair<std::size_t, double> KdTree::nearest(const Coord& q, std::size_t exclude) const {
  double best2 = std::numeric_limits<double>::infinity();
  std::size_t best = std::numeric_limits<std::size_t>::max();
  if (!ids_.empty()) nearest_rec(0, q, exclude, best2, best);
  return {best, std::sqrt(best2)};
}

void KdTree::nearest_rec(int node, const Coord& q, std::size_t exclude, double& best2, std::size_t& best) const {
  const Node& n = nodes_[node];
  if (box_dist2(n, q) > best2) return;
  if (n.left < 0) {
    for (std::size_t s = n.lo; s < n.hi; ++s) {
      if (ids_[s] == exclude) continue;
      const double d2 = dist2(s, q);
      if (d2 < best2 || (d2 == best2 && ids_[s] < best)) {
        best2 = d2;
        best = ids_[s];
      }
    }
    return;
  }
  const Node& l = nodes_[n.left];
  const Node& r = nodes_[n.right];
  if (box_dist2(l, q) <= box_dist2(r, q)) {
    nearest_rec(n.left, q, exclude, best2, best);
    nearest_rec(n.right, q, exclude, best2, best);
  } else {
    nearest_rec(n.right, q, exclude, best2, best);
    nearest_rec(n.left, q, exclude, best2, best);
  }
}

}  // namespace metsob
