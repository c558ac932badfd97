#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "metsob/functionals.hpp"

using namespace testing;

namespace {

// Direct double sum over all pairs.
double ep_oracle(const PointCloudSpace& s, const ScalarField& u, double t, double p) {
  const auto& ids = s.ids(u.region);
  double total = 0;
  for (std::size_t a = 0; a < ids.size(); ++a) {
    double num = 0, den = 0;
    for (std::size_t b = 0; b < ids.size(); ++b) {
      const double d = s.dist(ids[a], ids[b]);
      if (d >= t) continue;
      num += s.weight(ids[b]) * std::pow(std::abs(u.values[a] - u.values[b]), p);
      den += s.weight(ids[b]);
    }
    total += s.weight(ids[a]) * num / den;
  }
  return std::pow(total, 1 / p);
}

ScalarField noise(const PointCloudSpace& s, Region r, std::uint64_t seed) {
  Rng rng(seed);
  ScalarField f{r, {}};
  for (std::size_t k = 0; k < s.count(r); ++k) f.values.push_back(rng.normal());
  return f;
}

}  // namespace

TEST_CASE("Lp norm by hand") {
  std::vector<PointCloudSpace::Point> pts(3);
  pts[0] = {{0, 0, 0}, Region::Interior, 0.5};
  pts[1] = {{1, 0, 0}, Region::Interior, 0.25};
  pts[2] = {{0, 1, 0}, Region::Boundary, 1};
  const PointCloudSpace s(2, pts);
  const ScalarField f{Region::Interior, {2, -4}};
  CHECK(lp_norm(s, f, 1) == doctest::Approx(0.5 * 2 + 0.25 * 4));
  CHECK(lp_norm(s, f, 2) == doctest::Approx(std::sqrt(0.5 * 4 + 0.25 * 16)));
  CHECK(lp_norm(s, f, kInfinity) == 4);
  CHECK(mean(s, f) == doctest::Approx((1.0 - 1.0) / 0.75));
  CHECK_THROWS_AS(lp_norm(s, ScalarField{Region::Interior, {1}}, 2), Error);
}

TEST_CASE("E_p profile agrees with the pair oracle") {
  const auto s = random_cloud(150, 3);
  const auto u = noise(s, Region::Interior, 5);
  for (double p : {1.0, 2.0, 3.5}) {
    const auto prof = ep_profile(s, u, p);
    Rng rng(11);
    for (int k = 0; k < 12; ++k) {
      const double t = rng.uniform(0.01, 1.6);
      const double expect = ep_oracle(s, u, t, p);
      CHECK(prof.eval(t) == doctest::Approx(expect).epsilon(1e-10));
      CHECK(ep_functional(s, u, t, p) == doctest::Approx(expect).epsilon(1e-10));
    }
    CHECK(prof.eval(1e-9) == 0);
  }
}

TEST_CASE("GKS norm: exact profile against log-midpoint quadrature") {
  const auto s = random_cloud(120, 8);
  const auto u = noise(s, Region::Interior, 9);
  for (double alpha : {0.25, 0.75})
    for (double q : {1.0, 2.0}) {
      const BesovParams bp{alpha, 2, q, 0};
      const double exact = besov_norm_gks(s, u, bp).seminorm;
      const double quad = besov_norm_gks_quadrature(s, u, bp, 40).seminorm;
      CHECK(quad == doctest::Approx(exact).epsilon(0.02));
    }
}

TEST_CASE("constants have zero seminorm and norm = Lp norm") {
  const auto s = square(16);
  const auto c = constant(s, Region::Boundary, 3);
  const auto gks = besov_norm_gks(s, c, BesovParams{0.5, 2, 2, 0});
  CHECK(gks.seminorm == 0);
  CHECK(gks.norm == doctest::Approx(lp_norm(s, c, 2)));
  CHECK(besov_norm_bp(s, c, 0.5, 2).seminorm == 0);
}

TEST_CASE("Hajlasz feasible gradient satisfies the pointwise inequality") {
  const auto s = random_cloud(100, 21);
  const auto u = noise(s, Region::Interior, 22);
  for (double alpha : {0.3, 1.0}) {
    const auto g = hajlasz_feasible_gradient(s, u, alpha);
    const auto& ids = s.ids(Region::Interior);
    double worst = 0;
    for (std::size_t a = 0; a < ids.size(); ++a)
      for (std::size_t b = a + 1; b < ids.size(); ++b) {
        const double lhs = std::abs(u.values[a] - u.values[b]);
        const double rhs = std::pow(s.dist(ids[a], ids[b]), alpha) * (g.values[a] + g.values[b]);
        worst = std::max(worst, lhs / rhs);
      }
    CHECK(worst <= 1 + 1e-12);
    CHECK(verify_hajlasz(s, u, g, alpha) <= 1 + 1e-12);
    // Halving the gradient breaks it.
    ScalarField half = g;
    for (double& v : half.values) v /= 2;
    CHECK(verify_hajlasz(s, u, half, alpha) > 1);
  }
}

TEST_CASE("Lip field and Lipschitz constant of a linear function") {
  const auto s = square(32);
  const auto u = sample(s, Region::Interior, [](const Coord& x) { return x[0] + 2 * x[1]; });
  const double slope = std::sqrt(5.0);
  const auto lip = lip_field(s, u, 1.5 / 32);
  for (double v : lip.values) {
    CHECK(v <= slope + 1e-9);
    CHECK(v >= 0.8 * slope);
  }
  const double L = lipschitz_constant(s, u);
  CHECK(L <= slope + 1e-9);
  CHECK(L >= 0.99 * slope);
}

TEST_CASE("fractional maximal function against a radius scan") {
  const auto s = random_cloud(90, 31, 5);
  const auto f = noise(s, Region::Interior, 32);
  const double alpha = 0.5, p = 2;
  const auto M = frac_maximal(s, f, alpha, p);
  const auto& bd = s.ids(Region::Boundary);
  const auto& in = s.ids(Region::Interior);
  const double rmax = 2 * s.diam(Region::Boundary);
  for (std::size_t z = 0; z < bd.size(); ++z) {
    std::set<double> radii{rmax};
    for (std::size_t id : in)
      if (s.dist(bd[z], id) < rmax) radii.insert(s.dist(bd[z], id));
    double best = 0;
    for (double r : radii) {
      double num = 0, den = 0;
      for (std::size_t k = 0; k < in.size(); ++k)
        if (s.dist(bd[z], in[k]) < r) {
          num += s.weight(in[k]) * f.values[k] * f.values[k];
          den += s.weight(in[k]);
        }
      if (den > 0) best = std::max(best, std::pow(r, alpha) * num / den);
    }
    CHECK(M.values[z] == doctest::Approx(std::sqrt(best)).epsilon(1e-10));
  }
}

TEST_CASE("weak quasinorm of a two-valued field") {
  std::vector<PointCloudSpace::Point> pts(4);
  pts[0] = {{0, 0, 0}, Region::Interior, 1};
  pts[1] = {{1, 0, 0}, Region::Boundary, 0.5};
  pts[2] = {{2, 0, 0}, Region::Boundary, 0.25};
  pts[3] = {{3, 0, 0}, Region::Boundary, 0.25};
  const PointCloudSpace s(2, pts);
  const ScalarField m{Region::Boundary, {4, 1, 1}};
  // lambda just below 4: 4 * 0.5^e; just below 1: 1 * 1^e.
  CHECK(weak_quasinorm(s, m, 0.5) == doctest::Approx(std::max(4 * std::sqrt(0.5), 1.0)));
  CHECK(weak_quasinorm(s, m, 3) == doctest::Approx(1.0));
}

TEST_CASE("fractional maximal weak bound against the frozen constant") {
  const auto sq = square(32);
  const auto corpus = field_corpus(sq, Region::Interior, 6, 7, lipschitz_families());
  double worst = 0;
  for (const auto& u : corpus)
    worst = std::max(worst, weak_quasinorm(sq, frac_maximal(sq, u, 0.5, 2), 0.75) / lp_norm(sq, u, 2));
  const auto cmp = compare_upper("frac_maximal_weak_C", worst, frozen().get("frac_maximal_weak_C"));
  CHECK(cmp.pass);
}

TEST_CASE("row selection against exhaustive counting") {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t J = static_cast<std::size_t>(rng.integer(2, 12));
    const std::size_t K = static_cast<std::size_t>(rng.integer(4, 60));
    std::vector<std::vector<double>> a(J, std::vector<double>(K));
    for (std::size_t k = 0; k < K; ++k) {
      double sum = 0;
      for (std::size_t j = 0; j < J; ++j) sum += (a[j][k] = rng.gamma(0.2));
      for (std::size_t j = 0; j < J; ++j) a[j][k] *= 1 / sum;  // column sums = 1
    }
    const double eps = rng.uniform(0.05, 0.5);
    const auto sel = select_small_row(a, 1 + 1e-12, eps, 0);
    std::size_t most = 0;
    for (std::size_t j = 0; j < J; ++j)
      most = std::max<std::size_t>(most, std::count_if(a[j].begin(), a[j].end(), [&](double v) { return v <= eps; }));
    CHECK(sel.columns.size() == most);
    for (std::size_t k : sel.columns) CHECK(a[sel.j0][k] <= eps);
    CHECK(static_cast<long long>(sel.columns.size()) >= selection_guarantee(J, K, 1 + 1e-12, eps));
  }
}

TEST_CASE("row selection errors") {
  const std::vector<std::vector<double>> a{{0.9, 0.1}, {0.5, 0.2}};
  try {
    select_small_row(a, 1, 0.1, 0);
    FAIL("column sum exceeds the bound");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HypothesisFailed);
  }
  try {
    select_small_row({{0.5, 0.5}, {0.5, 0.5}}, 1, 0.1, 1);
    FAIL("no small entries");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PreconditionFailed);
  }
  CHECK_THROWS_AS(select_small_row({{1, 2}, {1}}, 10, 0.1, 0), Error);
}

TEST_CASE("exact inequality entries hold on a random cloud") {
  const auto s = random_cloud(60, 51, 3);
  std::vector<ScalarField> corpus;
  for (int k = 0; k < 4; ++k) corpus.push_back(noise(s, Region::Interior, 60 + k));
  InequalityConfig cfg;
  cfg.alphas = {0.5};
  cfg.ps = {1, 2};
  cfg.qs = {1, kInfinity};
  cfg.lambdas = {0.5};
  const auto res = inequality_suite(s, corpus, cfg);
  REQUIRE(!res.empty());
  std::size_t exact = 0;
  for (const auto& e : res)
    if (e.exact) {
      ++exact;
      CHECK_MESSAGE(e.worst_ratio <= 1 + 1e-9, e.id);
      CHECK(e.passed);
    }
  CHECK(exact > 0);
}

TEST_CASE("PI inequality with the infimal gradient") {
  const auto s = random_cloud(120, 81);
  const auto u = noise(s, Region::Interior, 82);
  const auto g = infimal_pi_transform(s, hajlasz_feasible_gradient(s, u, 1), 1);
  CHECK(verify_pi(s, u, g, 1).max_violation <= 1e-9);
}
