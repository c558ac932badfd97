#pragma once

#include <cmath>
#include <vector>

#include "metsob/constants.hpp"
#include "metsob/domains.hpp"
#include "metsob/experiments.hpp"
#include "metsob/space.hpp"

namespace testing {

using namespace metsob;

inline PointCloudSpace domain(DomainKind kind, int res, double eps = 0.25, int n = 0) {
  DomainSpec s;
  s.kind = kind;
  s.resolution = res;
  s.eps = eps;
  s.n = n;
  return generate(s);
}

inline PointCloudSpace square(int res) { return domain(DomainKind::UnitSquare, res); }

inline const FrozenConstants& frozen() {
  static const FrozenConstants fc = load_constants();
  return fc;
}

inline ScalarField constant(const PointCloudSpace& s, Region r, double c) {
  return ScalarField{r, std::vector<double>(s.count(r), c)};
}

inline ScalarField zero(const PointCloudSpace& s, Region r) { return constant(s, r, 0); }

inline PointCloudSpace random_cloud(std::size_t n, std::uint64_t seed, std::size_t boundary_every = 0) {
  Rng rng(seed);
  std::vector<PointCloudSpace::Point> pts(n);
  for (std::size_t k = 0; k < n; ++k) {
    pts[k].x = {rng.uniform(), rng.uniform(), 0};
    pts[k].region = boundary_every && k % boundary_every == 0 ? Region::Boundary : Region::Interior;
    pts[k].weight = rng.uniform(0.5, 1.5) / static_cast<double>(n);
  }
  return PointCloudSpace(2, pts);
}

}  // namespace testing
