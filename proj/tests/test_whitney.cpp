#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "helpers.hpp"
#include "metsob/whitney.hpp"

using namespace testing;

TEST_CASE("dyadic levels") {
  CHECK(dyadic_level(1) == 0);
  CHECK(dyadic_level(1.5) == 1);
  CHECK(dyadic_level(2) == 1);
  CHECK(dyadic_level(0.5) == -1);
  CHECK(dyadic_level(0.3) == -1);
  CHECK(dyadic_level(0.25) == -2);
  CHECK_THROWS_AS(dyadic_level(0), Error);
}

TEST_CASE("square cover: radii, anchors and levels by brute force") {
  const auto s = square(32);
  const auto cover = build_cover(s);
  REQUIRE(!cover.balls.empty());
  int top = std::numeric_limits<int>::min();
  for (const auto& b : cover.balls) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t z : s.ids(Region::Boundary)) best = std::min(best, s.dist(b.center, z));
    CHECK(b.radius == doctest::Approx(best / 8).epsilon(1e-12));
    CHECK(s.dist(b.center, b.anchor) == doctest::Approx(best).epsilon(1e-12));
    CHECK(std::ldexp(1.0, b.level - 1) < b.radius);
    CHECK(b.radius <= std::ldexp(1.0, b.level));
    top = std::max(top, b.level);
  }
  CHECK(cover.j0 == top);

  const auto chk = check_cover(s, cover);
  CHECK(chk.ok());
  CHECK(chk.uncovered == 0);
  CHECK(chk.measured_overlap <= cover.overlap_bound);
  CHECK(compare_upper("whitney_overlap_square", static_cast<double>(cover.overlap_bound),
                      frozen().get("whitney_overlap_square"))
            .pass);
}

TEST_CASE("overlap limit below the measured overlap fails the check") {
  const auto s = square(32);
  const auto cover = build_cover(s);
  REQUIRE(cover.overlap_bound > 1);
  const auto chk = check_cover(s, cover, cover.overlap_bound - 1);
  CHECK_FALSE(chk.overlap_ok);
  CHECK_FALSE(chk.ok());
}

TEST_CASE("tampered cover is caught") {
  const auto s = square(24);
  auto cover = build_cover(s);
  cover.balls[0].radius *= 2;
  CHECK_FALSE(check_cover(s, cover).radius_ok);
}

TEST_CASE("partition of unity sums to one and matches the tent formula") {
  const auto s = domain(DomainKind::Cusp, 48);
  const auto cover = build_cover(s);
  const PartitionOfUnity pu(s, cover);
  REQUIRE(pu.size() == s.count(Region::Interior));
  for (std::size_t k = 0; k < pu.size(); k += 7) {
    const std::size_t x = s.global(Region::Interior, k);
    double raw_total = 0;
    std::vector<double> raw(cover.balls.size(), 0);
    for (std::size_t b = 0; b < cover.balls.size(); ++b) {
      const double r = cover.balls[b].radius;
      raw[b] = std::clamp((2 * r - s.dist(x, cover.balls[b].center)) / r, 0.0, 1.0);
      raw_total += raw[b];
    }
    REQUIRE(raw_total > 0);
    double sum = 0;
    for (const auto& [b, w] : pu.row(k)) {
      CHECK(w == doctest::Approx(raw[b] / raw_total).epsilon(1e-12));
      sum += w;
    }
    CHECK(sum == doctest::Approx(1).epsilon(1e-12));
    const auto direct = partition_of_unity(s, cover, x);
    CHECK(direct.size() == pu.row(k).size());
  }
}

TEST_CASE("boundary patches") {
  const auto s = square(32);
  const auto cover = build_cover(s);
  for (std::size_t b = 0; b < cover.balls.size(); b += 11) {
    const auto small = boundary_patch(s, cover, b, 1);
    const auto big = boundary_patch(s, cover, b, 64);
    CHECK(small.size() <= big.size());
    for (std::size_t z : small) CHECK(s.dist(z, cover.balls[b].anchor) < cover.balls[b].radius + 1e-12);
  }
  CHECK_THROWS_AS(boundary_patch(s, cover, 0, 3), Error);
}

TEST_CASE("cusp and weighted disc covers pass their checks") {
  for (auto kind : {DomainKind::Cusp, DomainKind::WeightedDisc}) {
    const auto s = domain(kind, 32);
    const auto cover = build_cover(s);
    CHECK(check_cover(s, cover).ok());
  }
}
