#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "metsob/extension.hpp"
#include "metsob/functionals.hpp"
#include "metsob/trace.hpp"

using namespace testing;

TEST_CASE("ball average at one boundary point by hand") {
  const auto s = square(16);
  const auto u = sample(s, Region::Interior, [](const Coord& x) { return x[0]; });
  const std::size_t z = s.ids(Region::Boundary)[3];
  const double r = 0.2;
  double num = 0, den = 0;
  for (std::size_t k = 0; k < s.count(Region::Interior); ++k) {
    const std::size_t id = s.global(Region::Interior, k);
    if (s.dist(z, id) < r) {
      num += s.weight(id) * u.values[k];
      den += s.weight(id);
    }
  }
  CHECK(trace_at_radius(s, u, z, r) == doctest::Approx(num / den).epsilon(1e-12));
  CHECK(trace_average(s, u, r).values[3] == doctest::Approx(num / den).epsilon(1e-12));
}

TEST_CASE("trace of a Lipschitz field recovers its boundary values") {
  const auto s = square(64);
  auto fn = [](const Coord& x) { return std::sin(3 * x[0]) + x[1] * x[1]; };
  const auto u = sample(s, Region::Interior, fn);
  const auto rep = trace_field(s, u, 2, 12);
  REQUIRE(rep.radii.size() >= 3);
  CHECK(std::is_sorted(rep.radii.rbegin(), rep.radii.rend()));
  const double r = rep.radii.back();
  const double L = 3 + 2;
  for (std::size_t k = 0; k < s.count(Region::Boundary); ++k)
    CHECK(std::abs(rep.trace.values[k] - fn(s.point(s.global(Region::Boundary, k)).x)) <= L * r);
  // Gaps of a smooth field shrink like r; the fitted slope approaches 1 from
  // below as the resolution floor moves down.
  REQUIRE(std::isfinite(rep.fitted_rate));
  CHECK(rep.fitted_rate >= 0.5);
  CHECK(rep.fitted_rate <= 1.5);
  const auto coarse = square(32);
  const double slope32 = trace_field(coarse, sample(coarse, Region::Interior, fn), 2, 12).fitted_rate;
  CHECK(slope32 < rep.fitted_rate);
}

TEST_CASE("trace schedule truncates at the resolution") {
  const auto s = square(32);
  const auto sch = trace_schedule(s, 0, 60);
  CHECK(sch.truncated);
  CHECK(sch.radii.back() >= 2 * s.boundary_adjacent_spacing());
  CHECK(smallest_trace_radius(s) == doctest::Approx(sch.radii.back()));
  const auto few = trace_schedule(s, 0, 2);
  CHECK_FALSE(few.truncated);
  CHECK(few.radii.size() == 3);
}

TEST_CASE("supercritical regime is rejected") {
  const auto s = square(16);
  const auto u = zero(s, Region::Interior);
  try {
    trace_besov_report(s, u, u, 2, 2);
    FAIL("expected SupercriticalTrace");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SupercriticalTrace);
  }
}

TEST_CASE("trace Besov bounds against frozen constants") {
  const auto sq = square(32);
  const double h = lip_radius(sq);
  double haj = 0, tnorm = 0;
  for (const auto& u : field_corpus(sq, Region::Interior, 4, 7, lipschitz_families())) {
    const auto rep = trace_besov_report(sq, u, lip_field(sq, u, h), 2, 1, {0.1});
    CHECK(rep.smoothness == doctest::Approx(0.5));
    CHECK(rep.seminorm_inf <= rep.seminorm_pp * 4 + 1e-12);
    REQUIRE(rep.extra.size() == 1);
    CHECK(rep.extra[0].first == doctest::Approx(0.6));
    haj = std::max(haj, rep.hajlasz_ratio);
    tnorm = std::max(tnorm, rep.norm_ratio);
  }
  CHECK(compare_upper("trace_hajlasz_C", haj, frozen().get("trace_hajlasz_C")).pass);
  CHECK(compare_upper("trace_norm_C", tnorm, frozen().get("trace_norm_C")).pass);
}

TEST_CASE("local trace estimate against the frozen constant") {
  const auto sq = square(32);
  const double h = lip_radius(sq);
  double worst = 0;
  for (const auto& u : field_corpus(sq, Region::Interior, 4, 9, lipschitz_families())) {
    const auto g = lip_field(sq, u, h);
    const auto T = trace_average(sq, u, smallest_trace_radius(sq));
    for (std::size_t z = 0; z < sq.count(Region::Boundary); z += 17)
      for (double r : {0.1, 0.3}) {
        const auto lt = local_trace_estimate(sq, T, u, g, LocalTraceParams{}, Ball::at(sq.global(Region::Boundary, z), r));
        CHECK(lt.p_star > 0);
        if (lt.rhs > 0) worst = std::max(worst, lt.ratio);
      }
  }
  CHECK(compare_upper("local_trace_C", worst, frozen().get("local_trace_C")).pass);
}

TEST_CASE("trace weights") {
  TraceWeight w;
  w.scale = 4;
  w.exponent = 2;
  CHECK(w(4) == 1);
  CHECK(w(4 / std::exp(3.0)) == doctest::Approx(9));
  TraceWeight t;
  t.kind = TraceWeight::Kind::Table;
  t.table = {{0.1, 3}, {1, 1}};
  CHECK_NOTHROW(t.validate());
  CHECK(t(0.55) == doctest::Approx(2));
  CHECK(t(0.01) == 3);
  t.table = {{0.1, 1}, {1, 3}};
  CHECK_THROWS_AS(t.validate(), Error);
  t.table = {{0.1, 0.5}, {1, 0.5}};
  CHECK_THROWS_AS(t.validate(), Error);
}

TEST_CASE("weighted trace: constants match exactly, linear fields have finite ratio") {
  const auto s = domain(DomainKind::WeightedDisc, 32);
  const auto c = constant(s, Region::Interior, 2);
  TraceWeight w;
  const auto rep = weighted_trace(s, c, zero(s, Region::Interior), 2, w, 2);
  CHECK(rep.exact_match);
  CHECK(rep.ratio == 0);
  CHECK(rep.regime_ok);
  const auto u = sample(s, Region::Interior, [](const Coord& x) { return x[0]; });
  const auto lin = weighted_trace(s, u, lip_field(s, u, lip_radius(s)), 2, w, 2);
  CHECK(std::isfinite(lin.ratio));
  CHECK(lin.ratio > 0);
  CHECK(lin.mean_u == doctest::Approx(mean(s, u)));
  try {
    weighted_trace(s, u, lip_field(s, u, lip_radius(s)), 2, w, 1);
    FAIL("theta far from p must be rejected");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PreconditionFailed);
  }
}

TEST_CASE("divergence detection separates bounded and log-blowup fields") {
  const auto s = domain(DomainKind::WeightedDisc, 48);
  const auto bounded = sample(s, Region::Interior, [](const Coord& x) { return x[0] * x[1]; });
  CHECK_FALSE(detect_divergence(s, bounded, 0.25).no_trace);
  const auto blowup = log_distance_field(s, DomainKind::WeightedDisc, 0.25);
  const auto rep = detect_divergence(s, blowup, 0.25);
  CHECK(rep.no_trace);
  CHECK(rep.increasing_fraction >= 0.9);
  CHECK(std::is_sorted(rep.mean_average.begin(), rep.mean_average.end()));
}
