#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "metsob/space.hpp"

namespace metsob {

struct WhitneyBall {
  std::size_t center = 0;  // interior point id
  double radius = 0;       // dist(center, boundary point set) / 8
  int level = 0;           // 2^(level-1) < radius <= 2^level
  std::size_t anchor = 0;  // nearest boundary point id
};

struct WhitneyCover {
  std::vector<WhitneyBall> balls;
  int j0 = 0;                     // largest level present
  std::size_t overlap_bound = 0;  // max over interior points of the number of 2B containing it
};

// Level j with 2^(j-1) < r <= 2^j.
int dyadic_level(double r);

WhitneyCover build_cover(const PointCloudSpace& space);

struct WhitneyCheck {
  bool radius_ok = true;
  bool level_ok = true;
  bool coverage_ok = true;
  bool overlap_ok = true;
  bool anchor_ok = true;
  bool disjoint_ok = true;
  bool partition_ok = true;
  double worst_radius_error = 0;  // relative
  std::size_t uncovered = 0;
  std::size_t measured_overlap = 0;
  std::size_t intersecting_pairs = 0;  // level j against level j+2
  double worst_partition_error = 0;
  bool ok() const { return radius_ok && level_ok && coverage_ok && overlap_ok && anchor_ok && disjoint_ok && partition_ok; }
};

// Recomputes every invariant by brute force, independently of the builder.
// overlap_limit = 0 accepts the bound recorded in the cover.
WhitneyCheck check_cover(const PointCloudSpace& space, const WhitneyCover& cover, std::size_t overlap_limit = 0);

using SparseWeights = std::vector<std::pair<std::size_t, double>>;  // (ball index, weight)

// Normalised tent weights eta_B(x) = clamp((2r - d(x,p)) / r, 0, 1) at interior point x.
SparseWeights partition_of_unity(const PointCloudSpace& space, const WhitneyCover& cover, std::size_t interior_id);

// Weights for every interior point, indexed by interior local index.
class PartitionOfUnity {
 public:
  PartitionOfUnity(const PointCloudSpace& space, const WhitneyCover& cover);
  const SparseWeights& row(std::size_t interior_local) const { return rows_[interior_local]; }
  std::size_t size() const { return rows_.size(); }
  // Value of phi_b at every interior point.
  std::vector<double> column(std::size_t ball) const;

 private:
  std::vector<SparseWeights> rows_;
  std::size_t n_balls_;
};

// Boundary ids within expansion * r of the ball's anchor (expansion is 1 or 64).
std::vector<std::size_t> boundary_patch(const PointCloudSpace& space, const WhitneyCover& cover, std::size_t ball,
                                        double expansion);

}  // namespace metsob
