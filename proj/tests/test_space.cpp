#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "metsob/functionals.hpp"
#include "metsob/io.hpp"

using namespace testing;

TEST_CASE("open ball excludes points at exactly the radius") {
  std::vector<PointCloudSpace::Point> pts(2);
  pts[0].x = {0, 0, 0};
  pts[1].x = {1, 0, 0};
  pts[0].weight = pts[1].weight = 1;
  const PointCloudSpace s(2, pts);
  CHECK(s.ball_members(Ball::at(std::size_t{0}, 1.0), Region::Interior) == std::vector<std::size_t>{0});
  CHECK(s.ball_members(Ball::at(std::size_t{0}, 1.0 + 1e-12), Region::Interior).size() == 2);
}

TEST_CASE("ball larger than the diameter returns the whole region") {
  const auto s = random_cloud(80, 3, 4);
  for (Region r : {Region::Interior, Region::Boundary}) {
    auto got = s.ball_members(Ball::at(std::size_t{5}, 2 * std::sqrt(2.0)), r);
    std::sort(got.begin(), got.end());
    CHECK(got == s.ids(r));
  }
}

TEST_CASE("ball_members agrees with a brute-force scan") {
  const auto s = random_cloud(100, 11, 3);
  Rng rng(5);
  for (int q = 0; q < 200; ++q) {
    const std::size_t c = static_cast<std::size_t>(rng.integer(0, 99));
    const double r = q < 100 ? 0.3 : rng.uniform(0.01, 0.8);
    for (Region region : {Region::Interior, Region::Boundary}) {
      auto got = s.ball_members(Ball::at(c, r), region);
      std::sort(got.begin(), got.end());
      std::vector<std::size_t> want;
      for (std::size_t id = 0; id < s.size(); ++id) {
        const auto& a = s.point(c).x;
        const auto& b = s.point(id).x;
        if (s.point(id).region == region && std::hypot(a[0] - b[0], a[1] - b[1]) < r) want.push_back(id);
      }
      CHECK(got == want);
    }
  }
}

TEST_CASE("ball errors") {
  const auto s = random_cloud(10, 1);
  CHECK_THROWS_AS(s.ball_members(Ball::at(std::size_t{10}, 0.5), Region::Interior), Error);
  try {
    s.ball_members(Ball::at(std::size_t{42}, 0.5), Region::Interior);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoSuchPoint);
  }
  CHECK_THROWS_AS(s.ball_members(Ball::at(std::size_t{0}, 0.0), Region::Interior), Error);
}

TEST_CASE("ball_mass of a single weighted point") {
  std::vector<PointCloudSpace::Point> pts(1);
  pts[0].weight = 2.5;
  const PointCloudSpace s(2, pts);
  CHECK(s.ball_mass(Ball::at(std::size_t{0}, 1.0), Region::Interior) == doctest::Approx(2.5));
}

TEST_CASE("cusp ball masses scale like r^3 at the tip and r^2 inside") {
  const auto s = domain(DomainKind::Cusp, 128);
  // Area of {0<x2<x1^2, |x|<r} is about r^3/3 for small r.
  for (double r : {0.1, 0.2, 0.4}) {
    const double m = s.ball_mass(Ball::at(Coord{0, 0, 0}, r), Region::Interior);
    CHECK(m / (r * r * r) > 1.0 / 12);
    CHECK(m / (r * r * r) < 4.0 / 3);
  }
  const auto [id, d] = s.nearest_to(Coord{0.8, 0.3, 0}, Region::Interior);
  (void)d;
  for (double r : {0.02, 0.04}) {
    const double m = s.ball_mass(Ball::at(id, r), Region::Interior);
    CHECK(m / (std::numbers::pi * r * r) == doctest::Approx(1.0).epsilon(0.25));
  }
}

TEST_CASE("mass exponents on the square grid") {
  const auto s = square(48);
  const auto m = estimate_mass_exponents(s, default_probe_schedule(s));
  CHECK(m.s >= 1.9);
  CHECK(m.s <= 2.1);
  CHECK(m.c_dbl >= 1);
  // The returned constants satisfy their inequalities on every probe.
  for (std::size_t k = 0; k < s.count(Region::Interior); k += 97)
    for (double r : default_probe_schedule(s)) {
      const std::size_t id = s.global(Region::Interior, k);
      const double a = s.ball_mass(Ball::at(id, r), Region::Interior);
      const double b = s.ball_mass(Ball::at(id, 2 * r), Region::Interior);
      CHECK(b <= m.c_dbl * a * (1 + 1e-12));
    }
}

TEST_CASE("mass exponents of the weighted square stay bounded under refinement") {
  const auto coarse = domain(DomainKind::WeightedSquare, 32);
  const auto fine = domain(DomainKind::WeightedSquare, 64);
  const double c0 = estimate_mass_exponents(coarse, default_probe_schedule(coarse)).c_dbl;
  const double c1 = estimate_mass_exponents(fine, default_probe_schedule(fine)).c_dbl;
  CHECK(std::isfinite(c1));
  CHECK(c1 <= 1.5 * c0);
}

TEST_CASE("two-point space is insufficient geometry") {
  std::vector<PointCloudSpace::Point> pts(2);
  pts[1].x = {1, 0, 0};
  pts[0].weight = pts[1].weight = 1;
  const PointCloudSpace s(2, pts);
  try {
    estimate_mass_exponents(s, {0.5});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientGeometry);
  }
}

TEST_CASE("codimension exponents of the example domains") {
  {
    const auto s = square(48);
    const auto c = estimate_codim_bounds(s, default_probe_schedule(s));
    CHECK(c.vartheta == doctest::Approx(1).epsilon(0.15));
    CHECK(c.theta == doctest::Approx(1).epsilon(0.15));
    CHECK(c.vartheta <= c.theta);
  }
  {
    const auto s = domain(DomainKind::Cusp, 96);
    const auto c = estimate_codim_bounds(s, default_probe_schedule(s));
    CHECK(std::abs(c.vartheta - 1) <= 0.2);
    CHECK(std::abs(c.theta - 2) <= 0.2);
  }
  {
    const auto s = domain(DomainKind::WeightedDisc, 48);
    const auto c = estimate_codim_bounds(s, default_probe_schedule(s));
    CHECK(std::abs(c.vartheta - 2) <= 0.2);
    CHECK(std::abs(c.theta - 2) <= 0.2);
  }
}

TEST_CASE("codimension bounds need a boundary") {
  const auto s = random_cloud(30, 2);
  CHECK_THROWS_AS(estimate_codim_bounds(s, {0.2}), Error);
}

TEST_CASE("shell mass") {
  const auto s = square(64);
  CHECK(shell_mass(s, 2.0) == doctest::Approx(s.total_mass(Region::Interior)));
  const double rho = 0.1;
  const double ratio = shell_mass(s, rho) / (s.total_mass(Region::Boundary) * rho);
  CHECK(ratio >= 0.5);
  CHECK(ratio <= 2);
  // Exact collar area 1 - 0.8^2 = 0.36 up to one grid cell of width.
  CHECK(shell_mass(s, rho) == doctest::Approx(0.36).epsilon(0.1));
  CHECK(shell_mass(s, 1e-6) == 0);

  const auto cusp = domain(DomainKind::Cusp, 128);
  double hi = 0, lo = kInfinity;
  for (double r : {0.05, 0.1, 0.2}) {
    hi = std::max(hi, shell_mass(cusp, r) / r);
    lo = std::min(lo, shell_mass(cusp, r) / (r * r));
  }
  CHECK(std::isfinite(hi));
  CHECK(lo > 0);
}

TEST_CASE("shell-measure bracket with the estimated codimension constants") {
  const auto s = square(48);
  const auto c = estimate_codim_bounds(s, default_probe_schedule(s));
  const double H = s.total_mass(Region::Boundary);
  for (double rho : {0.05, 0.1, 0.2}) {
    const double m = shell_mass(s, rho);
    CHECK(m <= 8 * H * std::pow(rho, c.vartheta) / c.c_vartheta);
    CHECK(m >= H * std::pow(rho, c.theta) / (8 * c.c_theta));
  }
}

TEST_CASE("codimension Hausdorff content") {
  const auto s = square(64);
  std::vector<std::size_t> bottom;
  double h = 0;
  for (std::size_t id : s.ids(Region::Boundary))
    if (s.point(id).x[1] == 0) {
      bottom.push_back(id);
      h += s.weight(id);
    }
  const double v = codim_hausdorff(s, bottom, 1, 0.05);
  CHECK(v >= h / 3);
  CHECK(v <= 3 * h);
  // Raising theta can only raise the content for radii below one.
  CHECK(codim_hausdorff(s, bottom, 1.5, 0.05) >= v);

  const std::size_t z = bottom[bottom.size() / 2];
  const double one = codim_hausdorff(s, {z}, 1, 0.05);
  CHECK(one > 0);
  CHECK(one <= s.ball_mass(Ball::at(z, 0.05), Region::Interior) / 0.05 * (1 + 1e-12));

  try {
    codim_hausdorff(s, bottom, 1, 1e-5);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnresolvableScale);
  }
}

TEST_CASE("diameter and spacing caches") {
  const auto s = random_cloud(60, 8, 5);
  for (Region r : {Region::Interior, Region::Boundary}) {
    double d = 0;
    for (std::size_t a : s.ids(r))
      for (std::size_t b : s.ids(r)) d = std::max(d, s.dist(a, b));
    CHECK(s.diam(r) == d);
  }
}

TEST_CASE("point cloud and distance matrix round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "metsob_space_test";
  std::filesystem::create_directories(dir);
  const auto s = random_cloud(40, 21, 4);
  save_space(s, (dir / "c.msp").string());
  const auto t = load_space((dir / "c.msp").string());
  REQUIRE(t.size() == s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    CHECK(t.point(k).x == s.point(k).x);
    CHECK(t.point(k).weight == s.point(k).weight);
    CHECK(t.point(k).region == s.point(k).region);
  }
  std::vector<double> m(s.size() * s.size());
  for (std::size_t a = 0; a < s.size(); ++a)
    for (std::size_t b = 0; b < s.size(); ++b) m[a * s.size() + b] = 2 * s.dist(a, b);
  save_distance_matrix(m, s.size(), (dir / "c.msdm").string());
  const auto u = load_space((dir / "c.msp").string(), (dir / "c.msdm").string());
  CHECK(u.has_distance_matrix());
  CHECK(u.dist(3, 7) == doctest::Approx(2 * s.dist(3, 7)));
  CHECK(triangle_spot_check(u, 500, 1) <= 1e-12);
  CHECK(u.ball_members(Ball::at(std::size_t{3}, 0.4), Region::Interior).size() ==
        s.ball_members(Ball::at(std::size_t{3}, 0.2), Region::Interior).size());

  {
    std::ofstream bad((dir / "bad.msp").string());
    bad << "0 0 mu -1\n";
  }
  try {
    load_space((dir / "bad.msp").string());
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parse);
  }
  std::filesystem::remove_all(dir);
}
