#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"

using namespace testing;

TEST_CASE("generated masses match the continuous domains") {
  const auto sq = square(64);
  CHECK(sq.total_mass(Region::Interior) == doctest::Approx(1).epsilon(0.02));
  CHECK(sq.total_mass(Region::Boundary) == doctest::Approx(4).epsilon(0.02));

  DomainSpec cusp;
  cusp.kind = DomainKind::Cusp;
  cusp.resolution = 128;
  const auto c = generate(cusp);
  CHECK(analytic_interior_mass(cusp) == doctest::Approx(1.0 / 3.0));
  CHECK(c.total_mass(Region::Interior) == doctest::Approx(1.0 / 3.0).epsilon(0.05));

  const auto wd = domain(DomainKind::WeightedDisc, 64);
  CHECK(wd.total_mass(Region::Boundary) == doctest::Approx(2 * std::numbers::pi).epsilon(0.02));
  CHECK(wd.total_mass(Region::Interior) == doctest::Approx(std::numbers::pi / 3).epsilon(0.02));

  DomainSpec ws;
  ws.kind = DomainKind::WeightedSquare;
  ws.resolution = 64;
  CHECK(generate(ws).total_mass(Region::Interior) == doctest::Approx(analytic_interior_mass(ws)).epsilon(0.02));

  DomainSpec sh;
  sh.kind = DomainKind::SharpnessDisc;
  sh.resolution = 64;
  sh.eps = 0.9;
  CHECK(sharpness_exponent(sh) == 3);
  CHECK(generate(sh).total_mass(Region::Interior) == doctest::Approx(analytic_interior_mass(sh)).epsilon(0.03));
}

TEST_CASE("generation is deterministic and validates its spec") {
  const auto a = domain(DomainKind::Cusp, 32);
  const auto b = domain(DomainKind::Cusp, 32);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a.point(k).x == b.point(k).x);
    CHECK(a.point(k).weight == b.point(k).weight);
  }
  DomainSpec bad;
  bad.resolution = 2;
  CHECK_THROWS_AS(generate(bad), Error);
  CHECK_THROWS_AS(parse_domain_kind("torus"), Error);
}

TEST_CASE("analytic distances") {
  CHECK(analytic_boundary_distance(DomainKind::UnitSquare, {0.25, 0.5, 0}) == doctest::Approx(0.25));
  CHECK(analytic_boundary_distance(DomainKind::WeightedDisc, {0.3, 0.4, 0}) == doctest::Approx(0.5));
  // Points below the parabola: distance is at most the vertical gap.
  const double x = 0.6, y = 0.1;
  const double d = analytic_boundary_distance(DomainKind::Cusp, {x, y, 0});
  CHECK(d <= std::min(y, x * x - y) + 1e-12);
  CHECK(d > 0);
}

TEST_CASE("John check on the square") {
  const auto s = square(24);
  const auto g = john_check(s, deepest_interior_point(s), default_constant_grid());
  CHECK(g.ok);
  CHECK(g.best_c >= 0.3);
}

TEST_CASE("uniform check on the square and near the cusp tip") {
  const auto s = square(24);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  const auto& ids = s.ids(Region::Interior);
  for (std::size_t k = 0; k < 40; ++k) pairs.push_back({ids[(k * 131) % ids.size()], ids[(k * 977 + 13) % ids.size()]});
  const auto u = uniform_check(s, pairs, default_constant_grid());
  CHECK(u.ok);
  CHECK(u.best_c >= 0.2);

  // A pair of identical points is vacuous.
  CHECK(uniform_check(s, {{ids[0], ids[0]}}, default_constant_grid()).ok);

  const auto c = domain(DomainKind::Cusp, 128);
  std::vector<std::pair<std::size_t, std::size_t>> tip;
  // Points along the cusp: any connecting curve passes through a neck of width
  // about t^2, far thinner than c times the distance t.
  for (double t : {0.2, 0.25, 0.3}) {
    const auto a = c.nearest_to({t, t * t / 2, 0}, Region::Interior).first;
    const auto b = c.nearest_to({2 * t, 2 * t * t, 0}, Region::Interior).first;
    if (a != b) tip.push_back({a, b});
  }
  REQUIRE(!tip.empty());
  CHECK_FALSE(uniform_check(c, tip, {0.5, 0.95}).ok);
}

TEST_CASE("disconnected interior is rejected") {
  std::vector<PointCloudSpace::Point> pts;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      PointCloudSpace::Point a;
      a.x = {0.1 * i, 0.1 * j, 0};
      a.weight = 1;
      pts.push_back(a);
      a.x[0] += 5;
      pts.push_back(a);
    }
  PointCloudSpace::Point b;
  b.x = {-0.2, 0, 0};
  b.region = Region::Boundary;
  b.weight = 1;
  pts.push_back(b);
  const PointCloudSpace s(2, pts);
  try {
    john_check(s, 0, default_constant_grid());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotConnected);
  }
}

TEST_CASE("chains between boundary points of the square") {
  const auto s = square(32);
  const auto& bd = s.ids(Region::Boundary);
  // Opposite corners: every inflated ball lies in the carrot.
  const auto z = s.nearest_to({0, 0, 0}, Region::Boundary).first;
  const auto y = s.nearest_to({1, 1, 0}, Region::Boundary).first;
  const Chain ch = build_chain(s, z, y, 0.3, 1);
  CHECK(ch.balls.size() > 2);
  CHECK(verify_chain(s, ch).ok());

  // Neighbouring boundary points: radii decay fast, so the chain is short.
  const Chain near = build_chain(s, bd[10], bd[11], 0.3, 1);
  std::size_t positive = 0;
  for (const auto& b : near.balls) positive += b.k > 0;
  CHECK(positive <= 4);

  // Random boundary pairs.
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    const std::size_t a = bd[static_cast<std::size_t>(rng.integer(0, static_cast<int>(bd.size()) - 1))];
    const std::size_t b = bd[static_cast<std::size_t>(rng.integer(0, static_cast<int>(bd.size()) - 1))];
    if (a == b) continue;
    CHECK(verify_chain(s, build_chain(s, a, b, 0.3, 1)).ok());
  }
}

TEST_CASE("chain radii follow the geometric schedule") {
  const auto s = square(32);
  const auto z = s.nearest_to({0, 0.3, 0}, Region::Boundary).first;
  const auto y = s.nearest_to({1, 0.7, 0}, Region::Boundary).first;
  const double c_j = 0.3, lambda = 2;
  const Chain ch = build_chain(s, z, y, c_j, lambda);
  const double q = 1 - c_j / (2 * lambda);
  const double d = s.dist(z, y);
  for (const auto& b : ch.balls) {
    if (b.k == 0) {
      CHECK(b.radius == doctest::Approx(3 * d));
      continue;
    }
    CHECK(b.t == doctest::Approx(d * std::pow(q, std::abs(b.k))));
    CHECK(b.radius / b.t == doctest::Approx(c_j / (2 * lambda)));
  }
  CHECK(verify_chain(s, ch).ok());
  CHECK_THROWS_AS(build_chain(s, z, y, 1.0, 1.0), Error);
  CHECK_THROWS_AS(build_chain(s, z, z, 0.3, 1.0), Error);
}

TEST_CASE("averages of a Lipschitz field converge along a chain") {
  const auto s = square(64);
  const ScalarField u = sample(s, Region::Interior, [](const Coord& x) { return x[0] + 2 * x[1]; });
  const double lip = std::sqrt(5.0);
  const auto z = s.nearest_to({0, 0.5, 0}, Region::Boundary).first;
  const auto y = s.nearest_to({1, 0.5, 0}, Region::Boundary).first;
  const Chain ch = build_chain(s, z, y, 0.3, 1);
  const auto& zx = s.point(z).x;
  const double uz = zx[0] + 2 * zx[1];
  for (const auto& b : ch.balls) {
    if (b.k <= 0) continue;
    double num = 0, den = 0;
    s.for_each_in_ball(Ball::at(b.center, b.radius), Region::Interior, [&](std::size_t id, double) {
      num += s.weight(id) * u.values[s.local(id)];
      den += s.weight(id);
    });
    if (den == 0) continue;
    const double dist = std::hypot(b.center[0] - zx[0], b.center[1] - zx[1]);
    CHECK(std::abs(num / den - uz) <= 4 * lip * (dist + b.radius));
  }
}
