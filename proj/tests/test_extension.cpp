#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "metsob/extension.hpp"
#include "metsob/functionals.hpp"
#include "metsob/trace.hpp"
#include "metsob/whitney.hpp"

using namespace testing;

namespace {

std::vector<FieldFamily> extension_set() { return {FieldFamily::Fourier, FieldFamily::Cone, FieldFamily::Power}; }

}  // namespace

TEST_CASE("extension reproduces constants and is linear") {
  const auto s = square(32);
  const auto cover = build_cover(s);
  const BesovExtension ext(s, cover);
  const auto F = ext.apply(constant(s, Region::Boundary, 2.5));
  for (double v : F.values) CHECK(v == doctest::Approx(2.5).epsilon(1e-12));

  const auto fs = field_corpus(s, Region::Boundary, 2, 3, extension_set());
  ScalarField sum = fs[0];
  for (std::size_t k = 0; k < sum.values.size(); ++k) sum.values[k] = 2 * fs[0].values[k] - fs[1].values[k];
  const auto a = ext.apply(fs[0]), b = ext.apply(fs[1]), c = ext.apply(sum);
  for (std::size_t k = 0; k < c.values.size(); ++k)
    CHECK(c.values[k] == doctest::Approx(2 * a.values[k] - b.values[k]).epsilon(1e-10));

  const auto once = extend_besov(s, cover, fs[0]);
  CHECK(once.values == a.values);
}

TEST_CASE("patch averages are boundary means") {
  const auto s = square(32);
  const auto cover = build_cover(s);
  const BesovExtension ext(s, cover);
  const auto f = field_corpus(s, Region::Boundary, 1, 5, extension_set())[0];
  const auto avg = ext.patch_averages(f);
  for (std::size_t b = 0; b < cover.balls.size(); b += 13) {
    double num = 0, den = 0;
    for (std::size_t z : s.ids(Region::Boundary))
      if (s.dist(z, cover.balls[b].anchor) < cover.balls[b].radius) {
        num += s.weight(z) * f.values[s.local(z)];
        den += s.weight(z);
      }
    CHECK(avg[b] == doctest::Approx(num / den).epsilon(1e-12));
  }
}

TEST_CASE("round trip error shrinks with resolution for a Lipschitz boundary field") {
  double prev = 1e300;
  for (int res : {16, 32, 64}) {
    const auto s = square(res);
    const auto cover = build_cover(s);
    const auto f = sample(s, Region::Boundary, [](const Coord& x) { return std::cos(2 * x[0]) + x[1]; });
    const double e = roundtrip_error(s, cover, f, 2, ExtensionMode::Besov);
    CHECK(e < prev);
    prev = e;
  }
  CHECK(prev < 0.1);
}

TEST_CASE("shell, layer and pointwise bounds against frozen constants") {
  const auto sq = square(32);
  const auto cover = build_cover(sq);
  const BesovExtension ext(sq, cover);
  const double h = lip_radius(sq);
  double ball = 0, global = 0, layer = 0, pointwise = 0;
  const auto corpus = field_corpus(sq, Region::Boundary, 6, 7, extension_set());
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto& f = corpus[k];
    const auto F = ext.apply(f);
    const std::size_t z = sq.global(Region::Boundary, (k * 53) % sq.count(Region::Boundary));
    for (double r : {0.05, 0.2})
      for (double rho : {0.05, 0.25, 2.0}) {
        const auto e = shell_estimates(sq, F, f, z, r, rho, 2, 1);
        if (e.ball_rhs > 0) ball = std::max(ball, e.ball_lhs / e.ball_rhs);
        if (e.shell_rhs > 0) global = std::max(global, e.shell_lhs / e.shell_rhs);
      }
    const auto lipF = lip_field(sq, F, h);
    const double L = lipschitz_constant(sq, f);
    for (double rho : {0.1, 0.2, 0.4}) {
      const double v = lip_layer_ratio(sq, lipF, rho, L, 2);
      if (std::isfinite(v)) layer = std::max(layer, v);
    }
    pointwise = std::max(pointwise, extension_gradient_report(sq, cover, f, 2, 1).pointwise_ratio);
  }
  const auto& fc = frozen();
  CHECK(compare_upper("shell_ball_C", ball, fc.get("shell_ball_C")).pass);
  CHECK(compare_upper("shell_global_C", global, fc.get("shell_global_C")).pass);
  CHECK(compare_upper("lip_layer_C", layer, fc.get("lip_layer_C")).pass);
  CHECK(compare_upper("extension_pointwise_C", pointwise, fc.get("extension_pointwise_C")).pass);
}

TEST_CASE("gradient report requires p >= max(1, vartheta)") {
  const auto s = square(16);
  const auto cover = build_cover(s);
  CHECK_THROWS_AS(extension_gradient_report(s, cover, zero(s, Region::Boundary), 0.5, 1), Error);
  CHECK_THROWS_AS(extension_gradient_report(s, cover, zero(s, Region::Boundary), 1.5, 2), Error);
}

TEST_CASE("infimal convolution against the direct minimum") {
  const auto s = square(16);
  const auto f = field_corpus(s, Region::Boundary, 1, 11, {FieldFamily::Noise})[0];
  const auto& bd = s.ids(Region::Boundary);
  for (double L : {0.5, 4.0, 64.0}) {
    const auto g = inf_convolution(s, f, L);
    for (std::size_t a = 0; a < bd.size(); ++a) {
      double best = 1e300;
      for (std::size_t b = 0; b < bd.size(); ++b) best = std::min(best, f.values[b] + L * s.dist(bd[a], bd[b]));
      CHECK(g.values[a] == doctest::Approx(best).epsilon(1e-12));
      CHECK(g.values[a] <= f.values[a]);
    }
    CHECK(lipschitz_constant(s, g) <= L * (1 + 1e-12));
  }
}

TEST_CASE("Lipschitz approximation steps meet their targets") {
  const auto s = square(32);
  const auto f = sample(s, Region::Boundary, [](const Coord& x) { return x[0] < 0.5 ? 0.0 : 1.0; });
  const double fn = lp_norm(s, f, 2);
  const auto steps = lipschitz_approximation(s, f, 2, 8);
  REQUIRE(steps.size() >= 3);
  for (double v : steps[0].f.values) CHECK(v == 0);
  for (std::size_t k = 1; k < steps.size(); ++k) {
    ScalarField diff = steps[k].f;
    for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= f.values[i];
    CHECK(lp_norm(s, diff, 2) <= std::ldexp(fn, -static_cast<int>(k + 1)) * (1 + 1e-12));
    CHECK(steps[k].lip <= steps[k].L * (1 + 1e-12));
    CHECK(std::log2(steps[k].L) == doctest::Approx(std::round(std::log2(steps[k].L))));
  }
}

TEST_CASE("layer cutoff") {
  const auto s = square(32);
  const auto psi = layer_cutoff(s, 0.2, 0.1);
  for (std::size_t k = 0; k < psi.size(); ++k) {
    const double d = s.dist_to_boundary(k);
    CHECK(psi[k] == doctest::Approx(std::clamp((0.2 - d) / 0.1, 0.0, 1.0)));
  }
}

TEST_CASE("Lp extension of a jump") {
  const auto s = square(32);
  const auto cover = build_cover(s);
  const auto f = sample(s, Region::Boundary, [](const Coord& x) { return x[0] < 0.5 ? 0.0 : 1.0; });
  const auto rep = extend_lp(s, cover, f, 2, 40, 2);
  CHECK(rep.schedule_ok);
  CHECK_FALSE(rep.regime_warning);
  REQUIRE(!rep.layers.empty());
  for (std::size_t k = 1; k < rep.layers.size(); ++k) CHECK(rep.layers[k].rho <= rep.layers[k - 1].rho / 2 + 1e-15);
  CHECK(rep.F.values.size() == s.count(Region::Interior));
  CHECK(rep.roundtrip_error < lp_norm(s, f, 2));
  CHECK(extend_lp(s, cover, f, 2, 40, 1).regime_warning);
}
