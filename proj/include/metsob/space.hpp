#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "metsob/error.hpp"
#include "metsob/kdtree.hpp"

namespace metsob {

enum class Region : int { Interior = 0, Boundary = 1 };

inline const char* region_name(Region r) { return r == Region::Interior ? "interior" : "boundary"; }

struct Ball {
  std::optional<std::size_t> center_id;
  Coord center{};  // used when center_id is empty
  double radius = 0;

  static Ball at(std::size_t id, double r) { return Ball{id, {}, r}; }
  static Ball at(const Coord& c, double r) { return Ball{std::nullopt, c, r}; }
};

struct MassExponents {
  double s = 0;
  double c_s = 0;
  double c_dbl = 1;
};

struct CodimBounds {
  double vartheta = 0;
  double c_vartheta = 0;
  double theta = 0;
  double c_theta = 0;
};

// Values indexed by the region's local index (see PointCloudSpace::ids).
struct ScalarField {
  Region region = Region::Interior;
  std::vector<double> values;
};

// Unordered pair of local indices within one region, with its distance.
struct PairEntry {
  std::uint32_t i, j;
  double d;
};

// Weighted point cloud split into interior and boundary points. The weight of
// an interior point is its share of mu, the weight of a boundary point its share
// of the boundary measure.
class PointCloudSpace {
 public:
  struct Point {
    Coord x{};
    Region region = Region::Interior;
    double weight = 0;
  };

  PointCloudSpace(int dim, std::vector<Point> points, std::vector<double> distance_matrix = {});

  int dim() const { return dim_; }
  std::size_t size() const { return points_.size(); }
  const Point& point(std::size_t id) const;
  const std::vector<Point>& points() const { return points_; }
  bool has_distance_matrix() const { return !dmat_.empty(); }
  const std::vector<double>& distance_matrix() const { return dmat_; }

  // Global ids of a region in increasing order; local index = position in this list.
  const std::vector<std::size_t>& ids(Region r) const { return ids_[idx(r)]; }
  std::size_t count(Region r) const { return ids_[idx(r)].size(); }
  std::size_t local(std::size_t id) const { return local_[id]; }
  std::size_t global(Region r, std::size_t local_index) const { return ids_[idx(r)][local_index]; }
  double weight(std::size_t id) const { return points_[id].weight; }
  double weight_local(Region r, std::size_t li) const { return points_[global(r, li)].weight; }
  double total_mass(Region r) const { return total_mass_[idx(r)]; }

  double dist(std::size_t a, std::size_t b) const;
  double dist(std::size_t a, const Coord& c) const;

  // Open-ball queries. fn(id, distance) for members of `region`.
  template <class F>
  void for_each_in_ball(const Ball& b, Region region, F&& fn) const {
    check_ball(b);
    if (dmat_.empty()) {
      const Coord c = b.center_id ? points_[*b.center_id].x : b.center;
      trees_[idx(region)].radius_search(c, b.radius, fn);
    } else {
      for (std::size_t id : ids_[idx(region)]) {
        const double d = dmat_[*b.center_id * points_.size() + id];
        if (d < b.radius) fn(id, d);
      }
    }
  }
  std::vector<std::size_t> ball_members(const Ball& b, Region region) const;
  double ball_mass(const Ball& b, Region region) const;

  // Nearest point of `region` to point `id` (other than `id` itself when excluded).
  std::pair<std::size_t, double> nearest(std::size_t id, Region region) const;
  // Nearest point of `region` to an arbitrary coordinate (Euclidean spaces only).
  std::pair<std::size_t, double> nearest_to(const Coord& c, Region region) const;

  double diam(Region r) const { return diam_[idx(r)]; }
  // Median nearest-neighbour distance within a region.
  double spacing(Region r) const { return spacing_[idx(r)]; }
  double min_spacing(Region r) const { return min_spacing_[idx(r)]; }
  // Largest distance from a boundary point to its nearest interior point.
  double boundary_adjacent_spacing() const { return adjacent_spacing_; }
  // For interior local index i: distance to the boundary point set and nearest boundary id.
  double dist_to_boundary(std::size_t interior_local) const { return dist_bd_[interior_local]; }
  std::size_t nearest_boundary(std::size_t interior_local) const { return nearest_bd_[interior_local]; }
  const std::vector<double>& dist_to_boundary() const { return dist_bd_; }

  // All unordered pairs of the region sorted by distance (ties by index), built
  // on first use and shared by copies of this space.
  const std::vector<PairEntry>& sorted_pairs(Region r) const;

 private:
  static std::size_t idx(Region r) { return static_cast<std::size_t>(r); }
  void check_ball(const Ball& b) const;
  double compute_diam(Region r) const;

  int dim_;
  std::vector<Point> points_;
  std::vector<double> dmat_;
  std::vector<double> coords_;  // flat, stride dim_
  std::vector<std::size_t> ids_[2];
  std::vector<std::size_t> local_;
  KdTree trees_[2];
  double total_mass_[2] = {0, 0};
  double diam_[2] = {0, 0};
  double spacing_[2] = {0, 0};
  double min_spacing_[2] = {0, 0};
  double adjacent_spacing_ = 0;
  std::vector<double> dist_bd_;
  std::vector<std::size_t> nearest_bd_;
  struct PairCache {
    std::once_flag once[2];
    std::vector<PairEntry> pairs[2];
  };
  std::shared_ptr<PairCache> pair_cache_ = std::make_shared<PairCache>();
};

// Probe radii: dyadic from 4x the region's spacing up to its diameter.
std::vector<double> default_probe_schedule(const PointCloudSpace& space, Region region = Region::Interior);

// Mass exponents of mu on the interior, or of the boundary measure when
// region == Boundary (centres are then boundary points only).
MassExponents estimate_mass_exponents(const PointCloudSpace& space, const std::vector<double>& radii,
                                      Region region = Region::Interior);
CodimBounds estimate_codim_bounds(const PointCloudSpace& space, const std::vector<double>& radii);
double shell_mass(const PointCloudSpace& space, double rho);
// Greedy upper estimate of the codimension-theta Hausdorff content of a boundary subset.
double codim_hausdorff(const PointCloudSpace& space, const std::vector<std::size_t>& subset, double theta,
                       double delta);

}  // namespace metsob
