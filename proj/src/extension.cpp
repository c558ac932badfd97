#include "metsob/extension.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "metsob/functionals.hpp"
#include "metsob/trace.hpp"

namespace metsob {

namespace {

void require_boundary_field(const PointCloudSpace& space, const ScalarField& f) {
  check_field(space, f);
  require(f.region == Region::Boundary, ErrorCode::InvalidArgument, "f must be a boundary field");
}

double boundary_diff_norm(const PointCloudSpace& space, const ScalarField& a, const ScalarField& b, double p) {
  double s = 0;
  for (std::size_t k = 0; k < a.values.size(); ++k)
    s += space.weight_local(Region::Boundary, k) * std::pow(std::abs(a.values[k] - b.values[k]), p);
  return std::pow(s, 1 / p);
}

// Weighted double mean of |f(z) - f(w)| over a set, via sorting and prefix sums.
double double_mean_oscillation(const std::vector<std::pair<double, double>>& value_weight) {
  auto vw = value_weight;
  std::sort(vw.begin(), vw.end());
  double W = 0, S = 0, acc = 0;
  for (const auto& [v, w] : vw) {
    acc += w * (v * W - S);
    W += w;
    S += w * v;
  }
  return W > 0 ? 2 * acc / (W * W) : 0.0;
}

}  // namespace

BesovExtension::BesovExtension(const PointCloudSpace& space, const WhitneyCover& cover)
    : space_(&space), cover_(&cover), pu_(space, cover), patches_(cover.balls.size()) {
  for (std::size_t b = 0; b < cover.balls.size(); ++b) {
    auto ids = boundary_patch(space, cover, b, 1);
    for (auto& id : ids) id = space.local(id);
    patches_[b] = std::move(ids);
  }
}

std::vector<double> BesovExtension::patch_averages(const ScalarField& f) const {
  require_boundary_field(*space_, f);
  std::vector<double> a(patches_.size());
  for (std::size_t b = 0; b < patches_.size(); ++b) {
    double m = 0, s = 0;
    for (std::size_t li : patches_[b]) {
      const double w = space_->weight_local(Region::Boundary, li);
      m += w;
      s += w * f.values[li];
    }
    a[b] = s / m;
  }
  return a;
}

ScalarField BesovExtension::apply(const ScalarField& f) const {
  const auto a = patch_averages(f);
  ScalarField F{Region::Interior, std::vector<double>(pu_.size(), 0.0)};
  for (std::size_t k = 0; k < pu_.size(); ++k) {
    double s = 0;
    for (const auto& [b, w] : pu_.row(k)) s += w * a[b];
    F.values[k] = s;
  }
  return F;
}

ScalarField extend_besov(const PointCloudSpace& space, const WhitneyCover& cover, const ScalarField& f) {
  return BesovExtension(space, cover).apply(f);
}

ShellEstimate shell_estimates(const PointCloudSpace& space, const ScalarField& F, const ScalarField& f, std::size_t z,
                              double r, double rho, double p, double vartheta) {
  require_boundary_field(space, f);
  check_field(space, F);
  require(F.region == Region::Interior, ErrorCode::InvalidArgument, "F must be an interior field");
  require(z < space.size() && space.point(z).region == Region::Boundary, ErrorCode::NoSuchPoint,
          "no such boundary point: " + std::to_string(z));
  require(r > 0 && rho > 0 && p >= 1, ErrorCode::InvalidArgument, "need r > 0, rho > 0 and p >= 1");
  ShellEstimate e;
  space.for_each_in_ball(Ball::at(z, r), Region::Interior, [&](std::size_t id, double) {
    const std::size_t li = space.local(id);
    if (space.dist_to_boundary(li) < rho) e.ball_lhs += space.weight(id) * std::pow(std::abs(F.values[li]), p);
  });
  double near = 0;
  space.for_each_in_ball(Ball::at(z, 256 * r), Region::Boundary, [&](std::size_t id, double) {
    near += space.weight(id) * std::pow(std::abs(f.values[space.local(id)]), p);
  });
  e.ball_rhs = std::pow(std::min(r, rho), vartheta) * near;
  for (std::size_t li = 0; li < F.values.size(); ++li)
    if (space.dist_to_boundary(li) < rho)
      e.shell_lhs += space.weight_local(Region::Interior, li) * std::pow(std::abs(F.values[li]), p);
  e.shell_rhs = std::pow(rho, vartheta) * std::pow(lp_norm(space, f, p), p);
  return e;
}

double lip_radius(const PointCloudSpace& space) { return 1.5 * space.spacing(Region::Interior); }

GradientReport extension_gradient_report(const PointCloudSpace& space, const WhitneyCover& cover,
                                         const ScalarField& f, double p, double vartheta) {
  require_boundary_field(space, f);
  require(p >= std::max(1.0, vartheta), ErrorCode::InvalidArgument, "extension bounds need p >= max(1, vartheta)");
  const BesovExtension ext(space, cover);
  GradientReport rep;
  rep.F = ext.apply(f);
  rep.lip_F = lip_field(space, rep.F, lip_radius(space));
  rep.lip_norm = lp_norm(space, rep.lip_F, p);
  BesovParams bp;
  bp.alpha = 1 - vartheta / p;
  bp.p = p;
  bp.q = p;
  rep.besov_norm = besov_norm_gks(space, f, bp).norm;
  rep.ratio = rep.besov_norm > 0 ? rep.lip_norm / rep.besov_norm : 0.0;
  const double fn = lp_norm(space, f, p);
  rep.lp_ratio = fn > 0 ? lp_norm(space, rep.F, p) / (std::pow(space.diam(Region::Interior), vartheta / p) * fn) : 0.0;

  // Pointwise bound on balls the Lipschitz stencil can resolve.
  const double h = lip_radius(space);
  double worst = 0;
  for (std::size_t b = 0; b < cover.balls.size(); ++b) {
    const auto& ball = cover.balls[b];
    if (ball.radius < h) continue;
    std::vector<std::pair<double, double>> vw;
    for (std::size_t id : boundary_patch(space, cover, b, 64))
      vw.push_back({f.values[space.local(id)], space.weight(id)});
    const double osc = double_mean_oscillation(vw) / ball.radius;
    space.for_each_in_ball(Ball::at(ball.center, ball.radius), Region::Interior, [&](std::size_t id, double) {
      const double l = rep.lip_F.values[space.local(id)];
      if (l > 0) worst = std::max(worst, osc > 0 ? l / osc : kInfinity);
    });
  }
  rep.pointwise_ratio = worst;
  return rep;
}

double lip_layer_ratio(const PointCloudSpace& space, const ScalarField& lip_F, double rho, double lip_f, double p) {
  double num = 0, mass = 0;
  for (std::size_t li = 0; li < lip_F.values.size(); ++li) {
    if (!(space.dist_to_boundary(li) < rho)) continue;
    const double w = space.weight_local(Region::Interior, li);
    num += w * std::pow(lip_F.values[li], p);
    mass += w;
  }
  if (mass == 0) return std::nan("");
  const double den = mass * std::pow(lip_f, p);
  return den > 0 ? num / den : (num > 0 ? kInfinity : 0.0);
}

ScalarField inf_convolution(const PointCloudSpace& space, const ScalarField& f, double L) {
  require_boundary_field(space, f);
  require(L >= 0, ErrorCode::InvalidArgument, "L must be nonnegative");
  const auto& bd = space.ids(Region::Boundary);
  const std::size_t n = bd.size();
  ScalarField out{Region::Boundary, std::vector<double>(n)};
#pragma omp parallel for schedule(dynamic, 32)
  for (std::size_t i = 0; i < n; ++i) {
    double best = f.values[i];
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) best = std::min(best, f.values[j] + L * space.dist(bd[i], bd[j]));
    out.values[i] = best;
  }
  return out;
}

std::vector<LipschitzStep> lipschitz_approximation(const PointCloudSpace& space, const ScalarField& f, double p,
                                                   int k_max) {
  require_boundary_field(space, f);
  require(k_max >= 1, ErrorCode::InvalidArgument, "k_max must be at least 1");
  require(p >= 1 && std::isfinite(p), ErrorCode::InvalidArgument, "p must be a finite real >= 1");
  const std::size_t n = f.values.size();
  std::vector<LipschitzStep> out;
  out.push_back({ScalarField{Region::Boundary, std::vector<double>(n, 0.0)}, 0, 0});
  const double fn = lp_norm(space, f, p);
  if (fn == 0) {
    for (int k = 2; k <= k_max; ++k) out.push_back(out.front());
    return out;
  }
  const double lip_f = lipschitz_constant(space, f);
  // f^L = f once L >= LIP(f), so the search is bounded above by that exponent.
  const int m_top = lip_f > 0 ? static_cast<int>(std::ceil(std::log2(lip_f))) : -64;
  int m_prev = -64;
  for (int k = 2; k <= k_max; ++k) {
    const double tol = std::ldexp(fn, -k);
    auto ok = [&](int m) { return boundary_diff_norm(space, inf_convolution(space, f, std::ldexp(1.0, m)), f, p) <= tol; };
    int lo = m_prev, hi = std::max(m_top, m_prev);
    if (!ok(hi)) hi = m_top + 1;  // guards rounding in LIP(f)
    if (ok(lo)) {
      hi = lo;
    } else {
      while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        (ok(mid) ? hi : lo) = mid;
      }
    }
    m_prev = hi;
    LipschitzStep s;
    s.L = std::ldexp(1.0, hi);
    s.f = inf_convolution(space, f, s.L);
    s.lip = lipschitz_constant(space, s.f);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<double> layer_schedule(const PointCloudSpace& space, const std::vector<LipschitzStep>& approx,
                                   double f_norm) {
  require(approx.size() >= 2, ErrorCode::InvalidArgument, "need at least two approximations");
  require(f_norm >= 0, ErrorCode::InvalidArgument, "norm must be nonnegative");
  std::vector<double> rho;
  const double half_diam = space.diam(Region::Interior) / 2;
  for (std::size_t k = 1; k < approx.size(); ++k) {
    const double L = approx[k].lip;  // LIP(f_{k+1})
    const double cap = k == 1 ? half_diam : rho.back() / 2;
    // A layer whose next approximation is constant costs nothing in the budget.
    const double budget = std::ldexp(f_norm, -static_cast<int>(k)) / (1 + L);
    rho.push_back(L > 0 ? std::min(cap, budget) : cap);
  }
  return rho;
}

std::vector<double> layer_cutoff(const PointCloudSpace& space, double rho_k, double rho_next) {
  require(rho_k > rho_next && rho_next >= 0, ErrorCode::InvalidArgument, "need rho_k > rho_{k+1} >= 0");
  std::vector<double> psi(space.count(Region::Interior));
  for (std::size_t li = 0; li < psi.size(); ++li)
    psi[li] = std::clamp((rho_k - space.dist_to_boundary(li)) / (rho_k - rho_next), 0.0, 1.0);
  return psi;
}

ExtensionReport extend_lp(const PointCloudSpace& space, const WhitneyCover& cover, const ScalarField& f, double p,
                          int k_max, double theta) {
  require_boundary_field(space, f);
  require(k_max >= 1, ErrorCode::InvalidArgument, "k_max must be at least 1");
  ExtensionReport rep;
  rep.regime_warning = theta >= 0 && std::abs(theta - p) > 0.2;
  const double fn = lp_norm(space, f, p);
  const auto approx = lipschitz_approximation(space, f, p, k_max + 2);
  const auto rho = layer_schedule(space, approx, fn);  // rho[k-1] = rho_k, k = 1..k_max+1

  const auto& dist = space.dist_to_boundary();
  const double d_min = dist.empty() ? 0.0 : *std::min_element(dist.begin(), dist.end());
  int K = k_max;
  rep.truncated = true;
  for (int k = 1; k <= k_max; ++k)
    if (rho[k - 1] <= d_min) {
      K = k - 1;
      rep.truncated = false;
      break;
    }

  const BesovExtension ext(space, cover);
  const std::size_t n = space.count(Region::Interior);
  rep.F = ScalarField{Region::Interior, std::vector<double>(n, 0.0)};
  ScalarField prev{Region::Interior, std::vector<double>(n, 0.0)};  // E f_1 = 0
  for (int k = 1; k <= K; ++k) {
    const ScalarField next = ext.apply(approx[k].f);
    const auto psi = layer_cutoff(space, rho[k - 1], rho[k]);
    for (std::size_t li = 0; li < n; ++li) rep.F.values[li] += psi[li] * (next.values[li] - prev.values[li]);
    prev = next;
  }

  double budget = 0;
  for (int k = 1; k <= std::max(K, 1); ++k) {
    LayerRow row;
    row.k = k;
    row.rho = rho[k - 1];
    row.L = approx[k].lip;
    row.step = boundary_diff_norm(space, approx[k].f, approx[k - 1].f, p);
    budget += row.rho * row.L;
    if (row.step > std::ldexp(fn, 2 - k) * (1 + 1e-12)) rep.schedule_ok = false;
    if (!(row.rho > 0) || (k > 1 && row.rho > rep.layers.back().rho / 2)) rep.schedule_ok = false;
    rep.layers.push_back(row);
  }
  if (rho[0] > space.diam(Region::Interior) / 2 || budget > fn * (1 + 1e-12)) rep.schedule_ok = false;

  rep.lip_F = lip_field(space, rep.F, lip_radius(space));
  const double H = space.total_mass(Region::Boundary);
  const double diam = space.diam(Region::Interior);
  rep.norm_ratios.push_back({"lp", fn > 0 ? lp_norm(space, rep.F, p) / (std::pow(diam, p) * fn) : 0.0});
  rep.norm_ratios.push_back(
      {"lip", fn > 0 ? lp_norm(space, rep.lip_F, p) / ((1 + std::pow(H, 1 / p)) * fn) : 0.0});
  const ScalarField T = trace_average(space, rep.F, smallest_trace_radius(space));
  rep.roundtrip_error = boundary_diff_norm(space, T, f, p);
  return rep;
}

double roundtrip_error(const PointCloudSpace& space, const WhitneyCover& cover, const ScalarField& f, double p,
                       ExtensionMode mode, int k_max) {
  require_boundary_field(space, f);
  if (mode == ExtensionMode::Lp) return extend_lp(space, cover, f, p, k_max).roundtrip_error;
  const ScalarField F = extend_besov(space, cover, f);
  const ScalarField T = trace_average(space, F, smallest_trace_radius(space));
  return boundary_diff_norm(space, T, f, p);
}

}  // namespace metsob
