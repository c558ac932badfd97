#include "metsob/functionals.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <map>
#include <numeric>

namespace metsob {

namespace {

constexpr std::size_t kRecomputeEvery = 2048;

double pow_abs(double x, double p) { return p == 1 ? std::abs(x) : std::pow(std::abs(x), p); }

// int_a^b t^(-s-1) dt for 0 < a < b.
double power_integral(double a, double b, double s) {
  if (s == 0) return std::log(b / a);
  return std::pow(a, -s) * -std::expm1(s * std::log(a / b)) / s;
}

double resolve_radius(const PointCloudSpace& space, Region region, double R) {
  if (R > 0) return R;
  require(R == 0, ErrorCode::InvalidArgument, "R must be positive (or 0 for the default)");
  const double r = default_besov_radius(space, region);
  require(r > 0, ErrorCode::InsufficientGeometry, "insufficient geometry: region has zero diameter");
  return r;
}

void check_exponent(double p) {
  require(p >= 1 && std::isfinite(p), ErrorCode::InvalidArgument, "p must be a finite real >= 1");
}

struct Neighbour {
  double d;
  std::size_t local;
};

// Other points of the region sorted by distance from local index `i`.
std::vector<Neighbour> sorted_neighbours(const PointCloudSpace& space, Region region, std::size_t i) {
  const auto& ids = space.ids(region);
  std::vector<Neighbour> out;
  out.reserve(ids.size());
  for (std::size_t k = 0; k < ids.size(); ++k)
    if (k != i) out.push_back({space.dist(ids[i], ids[k]), k});
  std::sort(out.begin(), out.end(), [](const Neighbour& a, const Neighbour& b) {
    return a.d < b.d || (a.d == b.d && a.local < b.local);
  });
  return out;
}

}  // namespace

void check_field(const PointCloudSpace& space, const ScalarField& f) {
  require(f.values.size() == space.count(f.region), ErrorCode::InvalidArgument,
          std::string("field size does not match the ") + region_name(f.region) + " point count");
  for (double v : f.values) require(std::isfinite(v), ErrorCode::InvalidArgument, "field values must be finite");
}

double lp_norm(const PointCloudSpace& space, const ScalarField& f, double p) {
  check_field(space, f);
  if (std::isinf(p)) {
    double m = 0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  require(p > 0, ErrorCode::InvalidArgument, "p must be positive");
  double s = 0;
  for (std::size_t k = 0; k < f.values.size(); ++k) s += space.weight_local(f.region, k) * pow_abs(f.values[k], p);
  return std::pow(s, 1 / p);
}

double mean(const PointCloudSpace& space, const ScalarField& f) {
  check_field(space, f);
  double s = 0, m = 0;
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    s += space.weight_local(f.region, k) * f.values[k];
    m += space.weight_local(f.region, k);
  }
  require(m > 0, ErrorCode::InvalidArgument, "empty region");
  return s / m;
}

double EpProfile::eval(double t) const {
  // value[k] applies on (breaks[k], breaks[k+1]].
  const std::size_t k = std::lower_bound(breaks.begin(), breaks.end(), t) - breaks.begin();
  return k == 0 ? 0.0 : value[k - 1];
}

EpProfile ep_profile(const PointCloudSpace& space, const ScalarField& u, double p) {
  check_field(space, u);
  check_exponent(p);
  const Region region = u.region;
  const std::size_t n = space.count(region);
  const auto& pairs = space.sorted_pairs(region);
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) w[k] = space.weight_local(region, k);
  std::vector<long double> S(n, 0.0L), M(w.begin(), w.end()), c(n, 0.0L);
  long double T = 0;

  EpProfile prof;
  prof.p = p;
  prof.lp_norm = lp_norm(space, u, p);
  std::size_t groups = 0;
  for (std::size_t a = 0; a < pairs.size();) {
    std::size_t b = a;
    const double d = pairs[a].d;
    for (; b < pairs.size() && pairs[b].d == d; ++b) {
      const auto [i, j, dd] = pairs[b];
      const long double diff = pow_abs(u.values[i] - u.values[j], p);
      T -= c[i] + c[j];
      S[i] += w[j] * diff;
      M[i] += w[j];
      S[j] += w[i] * diff;
      M[j] += w[i];
      c[i] = w[i] * S[i] / M[i];
      c[j] = w[j] * S[j] / M[j];
      T += c[i] + c[j];
    }
    if (++groups % kRecomputeEvery == 0) T = std::accumulate(c.begin(), c.end(), 0.0L);
    prof.breaks.push_back(d);
    prof.value.push_back(std::pow(static_cast<double>(std::max(T, 0.0L)), 1 / p));
    a = b;
  }
  if (!prof.value.empty()) {
    T = std::accumulate(c.begin(), c.end(), 0.0L);
    prof.value.back() = std::pow(static_cast<double>(std::max(T, 0.0L)), 1 / p);
  }
  return prof;
}

double ep_functional(const PointCloudSpace& space, const ScalarField& u, double t, double p) {
  check_field(space, u);
  check_exponent(p);
  require(t > 0, ErrorCode::InvalidArgument, "t must be positive");
  const auto& ids = space.ids(u.region);
  std::vector<double> part(ids.size());
#pragma omp parallel for schedule(dynamic, 32)
  for (std::size_t k = 0; k < ids.size(); ++k) {
    double s = 0, m = 0;
    space.for_each_in_ball(Ball::at(ids[k], t), u.region, [&](std::size_t id, double) {
      const double wz = space.weight(id);
      s += wz * pow_abs(u.values[k] - u.values[space.local(id)], p);
      m += wz;
    });
    part[k] = space.weight(ids[k]) * s / m;
  }
  double total = 0;
  for (double v : part) total += v;
  return std::pow(total, 1 / p);
}

double default_besov_radius(const PointCloudSpace& space, Region region) { return 2 * space.diam(region); }

double besov_seminorm(const EpProfile& prof, double alpha, double q, double R) {
  require(alpha >= 0 && alpha <= 1, ErrorCode::InvalidArgument, "alpha must lie in [0,1]");
  require(q > 0, ErrorCode::InvalidArgument, "q must be positive");
  require(R > 0, ErrorCode::InvalidArgument, "R must be positive");
  const auto& br = prof.breaks;
  if (std::isinf(q)) {
    double sup = 0;
    for (std::size_t k = 0; k < br.size() && br[k] < R; ++k) {
      if (prof.value[k] == 0) continue;
      if (alpha == 0) {
        sup = std::max(sup, prof.value[k]);
      } else {
        sup = std::max(sup, br[k] > 0 ? prof.value[k] / std::pow(br[k], alpha) : kInfinity);
      }
    }
    return sup;
  }
  const double s = alpha * q;
  double sum = 0;
  for (std::size_t k = 0; k < br.size() && br[k] < R; ++k) {
    if (prof.value[k] == 0) continue;
    const double a = br[k];
    const double b = k + 1 < br.size() ? std::min(br[k + 1], R) : R;
    if (!(b > a)) continue;
    if (a == 0) return kInfinity;
    sum += std::pow(prof.value[k], q) * power_integral(a, b, s);
  }
  return std::pow(sum, 1 / q);
}

NormPair besov_norm_gks(const PointCloudSpace& space, const ScalarField& u, const BesovParams& params) {
  const double R = resolve_radius(space, u.region, params.R);
  const EpProfile prof = ep_profile(space, u, params.p);
  NormPair out;
  out.seminorm = besov_seminorm(prof, params.alpha, params.q, R);
  out.norm = prof.lp_norm + out.seminorm;
  return out;
}

NormPair besov_norm_gks_quadrature(const PointCloudSpace& space, const ScalarField& u, const BesovParams& params,
                                   int nodes_per_octave) {
  check_field(space, u);
  check_exponent(params.p);
  require(nodes_per_octave > 0, ErrorCode::InvalidArgument, "need at least one node per octave");
  const double R = resolve_radius(space, u.region, params.R);
  const double floor_t = 0.5 * space.min_spacing(u.region);
  const double h = std::log(2.0) / nodes_per_octave;
  double acc = 0;
  for (int j = 0;; ++j) {
    const double t = R * std::exp(-(j + 0.5) * h);
    if (t < floor_t || (floor_t == 0 && j > 64 * nodes_per_octave)) break;
    const double ratio = ep_functional(space, u, t, params.p) / std::pow(t, params.alpha);
    if (std::isinf(params.q)) {
      acc = std::max(acc, ratio);
    } else {
      acc += std::pow(ratio, params.q) * h;
    }
  }
  NormPair out;
  out.seminorm = std::isinf(params.q) ? acc : std::pow(acc, 1 / params.q);
  out.norm = lp_norm(space, u, params.p) + out.seminorm;
  return out;
}

NormPair besov_norm_bp(const PointCloudSpace& space, const ScalarField& u, double alpha, double p, double R) {
  check_field(space, u);
  check_exponent(p);
  require(alpha >= 0 && alpha < 1, ErrorCode::InvalidArgument, "alpha must lie in [0,1)");
  R = resolve_radius(space, u.region, R);
  const Region region = u.region;
  const std::size_t n = space.count(region);
  const auto& pairs = space.sorted_pairs(region);
  std::vector<double> w(n), M(n);
  for (std::size_t k = 0; k < n; ++k) M[k] = w[k] = space.weight_local(region, k);
  long double sum = 0;
  for (std::size_t a = 0; a < pairs.size() && pairs[a].d < R;) {
    const double d = pairs[a].d;
    require(d > 0, ErrorCode::DegenerateMetric, "degenerate metric: distinct points at zero distance");
    std::size_t b = a;
    // Ball masses are read before the group is added: the balls are open.
    for (; b < pairs.size() && pairs[b].d == d; ++b) {
      const auto [i, j, dd] = pairs[b];
      const double term = w[i] * w[j] * pow_abs(u.values[i] - u.values[j], p) / std::pow(d, alpha * p);
      sum += term / M[i] + term / M[j];
    }
    for (std::size_t e = a; e < b; ++e) {
      M[pairs[e].i] += w[pairs[e].j];
      M[pairs[e].j] += w[pairs[e].i];
    }
    a = b;
  }
  NormPair out;
  out.seminorm = std::pow(static_cast<double>(sum), 1 / p);
  out.norm = lp_norm(space, u, p) + out.seminorm;
  return out;
}

ScalarField hajlasz_feasible_gradient(const PointCloudSpace& space, const ScalarField& u, double alpha) {
  check_field(space, u);
  require(alpha >= 0 && alpha <= 1, ErrorCode::InvalidArgument, "alpha must lie in [0,1]");
  const auto& ids = space.ids(u.region);
  const std::size_t n = ids.size();
  ScalarField g{u.region, std::vector<double>(n, 0.0)};
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t i = 0; i < n; ++i) {
    double best = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double diff = std::abs(u.values[i] - u.values[j]);
      if (diff == 0) continue;
      const double d = space.dist(ids[i], ids[j]);
      require(d > 0, ErrorCode::DegenerateMetric, "degenerate metric: distinct points at zero distance");
      best = std::max(best, diff / (2 * std::pow(d, alpha)));
    }
    // A few ulps of headroom keep the inequality exact after rounding.
    g.values[i] = best * (1 + 8 * DBL_EPSILON);
  }
  return g;
}

ScalarField hajlasz_averaged_gradient(const PointCloudSpace& space, const ScalarField& u, double alpha, double Q,
                                      double c_Q) {
  check_field(space, u);
  require(c_Q > 0 && Q > 0, ErrorCode::InvalidArgument, "Q and c_Q must be positive");
  const std::size_t n = space.count(u.region);
  const double factor = std::pow(2.0, Q + alpha) / c_Q;
  ScalarField g{u.region, std::vector<double>(n, 0.0)};
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t i = 0; i < n; ++i) {
    const auto nb = sorted_neighbours(space, u.region, i);
    double S = 0, M = space.weight_local(u.region, i), best = 0;
    for (std::size_t a = 0; a < nb.size();) {
      const double d = nb[a].d;
      std::size_t b = a;
      for (; b < nb.size() && nb[b].d == d; ++b) {
        const double wz = space.weight_local(u.region, nb[b].local);
        S += wz * std::abs(u.values[i] - u.values[nb[b].local]);
        M += wz;
      }
      if (d > 0) best = std::max(best, S / M / std::pow(d, alpha));
      a = b;
    }
    g.values[i] = factor * best;
  }
  return g;
}

double verify_hajlasz(const PointCloudSpace& space, const ScalarField& u, const ScalarField& g, double alpha) {
  check_field(space, u);
  check_field(space, g);
  require(u.region == g.region, ErrorCode::InvalidArgument, "u and g must live on the same region");
  const auto& ids = space.ids(u.region);
  const std::size_t n = ids.size();
  double worst = -kInfinity;
#pragma omp parallel for schedule(dynamic, 16) reduction(max : worst)
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = space.dist(ids[i], ids[j]);
      worst = std::max(worst, std::abs(u.values[i] - u.values[j]) - std::pow(d, alpha) * (g.values[i] + g.values[j]));
    }
  return worst;
}

std::vector<double> pi_family_radii(const PointCloudSpace& space) {
  std::vector<double> radii;
  const double h = space.spacing(Region::Interior);
  const double diam = space.diam(Region::Interior);
  if (!(h > 0)) return {diam > 0 ? diam : 1.0};
  for (double r = 2 * h; r <= diam * (1 + 1e-12); r *= 2) radii.push_back(r);
  if (radii.empty()) radii.push_back(2 * h);
  return radii;
}

PiViolation verify_pi(const PointCloudSpace& space, const ScalarField& u, const ScalarField& g, double q,
                      double lambda, std::size_t center_stride) {
  check_field(space, u);
  check_field(space, g);
  require(u.region == Region::Interior && g.region == Region::Interior, ErrorCode::InvalidArgument,
          "u and g must be interior fields");
  require(q > 0 && lambda >= 1 && center_stride >= 1, ErrorCode::InvalidArgument, "need q > 0, lambda >= 1, stride >= 1");
  const auto radii = pi_family_radii(space);
  const std::size_t n = space.size();
  std::vector<PiViolation> per(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::size_t c = 0; c < n; c += center_stride) {
    for (double r : radii) {
      double m = 0, su = 0;
      std::vector<std::size_t> members;
      space.for_each_in_ball(Ball::at(c, r), Region::Interior, [&](std::size_t id, double) { members.push_back(id); });
      if (members.empty()) continue;
      std::sort(members.begin(), members.end());
      for (std::size_t id : members) {
        m += space.weight(id);
        su += space.weight(id) * u.values[space.local(id)];
      }
      const double ub = su / m;
      double osc = 0;
      for (std::size_t id : members) osc += space.weight(id) * std::abs(u.values[space.local(id)] - ub);
      osc /= m;
      std::vector<std::size_t> big;
      space.for_each_in_ball(Ball::at(c, lambda * r), Region::Interior, [&](std::size_t id, double) { big.push_back(id); });
      std::sort(big.begin(), big.end());
      double mg = 0, sg = 0;
      for (std::size_t id : big) {
        mg += space.weight(id);
        sg += space.weight(id) * std::pow(g.values[space.local(id)], q);
      }
      const double rhs = r * std::pow(sg / mg, 1 / q);
      const double v = osc - rhs;
      if (v > per[c].max_violation) per[c] = {v, c, r};
    }
  }
  PiViolation out;
  for (const auto& v : per)
    if (v.max_violation > out.max_violation) out = v;
  return out;
}

ScalarField infimal_pi_transform(const PointCloudSpace& space, const ScalarField& g, double q, std::size_t center_stride) {
  check_field(space, g);
  require(g.region == Region::Interior, ErrorCode::InvalidArgument, "g must be an interior field");
  require(q > 0 && center_stride >= 1, ErrorCode::InvalidArgument, "need q > 0 and stride >= 1");
  for (double v : g.values) require(v >= 0, ErrorCode::InvalidArgument, "g must be nonnegative");
  const auto radii = pi_family_radii(space);
  ScalarField h = g;  // singleton balls
  const std::size_t n = space.size();
  for (std::size_t c = 0; c < n; c += center_stride) {
    for (double r : radii) {
      std::vector<std::size_t> members;
      space.for_each_in_ball(Ball::at(c, r), Region::Interior, [&](std::size_t id, double) { members.push_back(id); });
      if (members.empty()) continue;
      std::sort(members.begin(), members.end());
      double m = 0, s = 0;
      for (std::size_t id : members) {
        m += space.weight(id);
        s += space.weight(id) * std::pow(g.values[space.local(id)], q);
      }
      const double avg = std::pow(s / m, 1 / q);
      for (std::size_t id : members) {
        double& hv = h.values[space.local(id)];
        hv = std::max(hv, avg);
      }
    }
  }
  return h;
}

ScalarField lip_field(const PointCloudSpace& space, const ScalarField& u, double rho_c) {
  check_field(space, u);
  require(rho_c > 0, ErrorCode::InvalidArgument, "connectivity radius must be positive");
  const auto& ids = space.ids(u.region);
  ScalarField out{u.region, std::vector<double>(ids.size(), 0.0)};
#pragma omp parallel for schedule(dynamic, 64)
  for (std::size_t k = 0; k < ids.size(); ++k) {
    double best = 0;
    space.for_each_in_ball(Ball::at(ids[k], rho_c), u.region, [&](std::size_t id, double d) {
      if (d > 0) best = std::max(best, std::abs(u.values[k] - u.values[space.local(id)]) / d);
    });
    out.values[k] = best;
  }
  return out;
}

double lipschitz_constant(const PointCloudSpace& space, const ScalarField& u) {
  check_field(space, u);
  const auto& ids = space.ids(u.region);
  const std::size_t n = ids.size();
  double best = 0;
#pragma omp parallel for schedule(dynamic, 16) reduction(max : best)
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = space.dist(ids[i], ids[j]);
      if (d > 0) best = std::max(best, std::abs(u.values[i] - u.values[j]) / d);
    }
  return best;
}

ScalarField frac_maximal(const PointCloudSpace& space, const ScalarField& f, double alpha, double p) {
  check_field(space, f);
  require(f.region == Region::Interior, ErrorCode::InvalidArgument, "f must be an interior field");
  require(alpha >= 0, ErrorCode::InvalidArgument, "alpha must be nonnegative");
  check_exponent(p);
  const double rmax = 2 * space.diam(Region::Boundary);
  const auto& bd = space.ids(Region::Boundary);
  const auto& in = space.ids(Region::Interior);
  ScalarField out{Region::Boundary, std::vector<double>(bd.size(), 0.0)};
  std::vector<char> empty(bd.size(), 0);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::size_t z = 0; z < bd.size(); ++z) {
    std::vector<Neighbour> nb(in.size());
    for (std::size_t k = 0; k < in.size(); ++k) nb[k] = {space.dist(bd[z], in[k]), k};
    std::sort(nb.begin(), nb.end(), [](const Neighbour& a, const Neighbour& b) {
      return a.d < b.d || (a.d == b.d && a.local < b.local);
    });
    double S = 0, M = 0, best = 0;
    bool any = false;
    for (std::size_t a = 0; a < nb.size() && nb[a].d < rmax;) {
      std::size_t b = a;
      for (; b < nb.size() && nb[b].d == nb[a].d; ++b) {
        const double w = space.weight_local(Region::Interior, nb[b].local);
        S += w * pow_abs(f.values[nb[b].local], p);
        M += w;
      }
      // The mean is fixed on (d_a, d_b]; r^alpha is largest at the right end.
      const double r_end = b < nb.size() ? std::min(nb[b].d, rmax) : rmax;
      best = std::max(best, std::pow(r_end, alpha) * S / M);
      any = true;
      a = b;
    }
    if (!any) empty[z] = 1;
    out.values[z] = std::pow(best, 1 / p);
  }
  for (char e : empty) require(!e, ErrorCode::RadiusBelowResolution, "boundary point with every ball empty");
  return out;
}

double weak_quasinorm(const PointCloudSpace& space, const ScalarField& m, double exponent) {
  check_field(space, m);
  std::vector<std::pair<double, double>> vw;
  for (std::size_t k = 0; k < m.values.size(); ++k) vw.push_back({m.values[k], space.weight_local(m.region, k)});
  std::sort(vw.begin(), vw.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  double mass = 0, best = 0;
  for (std::size_t a = 0; a < vw.size();) {
    std::size_t b = a;
    for (; b < vw.size() && vw[b].first == vw[a].first; ++b) mass += vw[b].second;
    if (vw[a].first > 0) best = std::max(best, vw[a].first * std::pow(mass, exponent));
    a = b;
  }
  return best;
}

Selection select_small_row(const std::vector<std::vector<double>>& a, double k_bound, double eps, std::size_t min_card) {
  require(!a.empty() && !a[0].empty(), ErrorCode::InvalidArgument, "matrix must be nonempty");
  require(eps > 0, ErrorCode::InvalidArgument, "eps must be positive");
  const std::size_t J = a.size(), K = a[0].size();
  for (const auto& row : a) {
    require(row.size() == K, ErrorCode::InvalidArgument, "ragged matrix");
    for (double v : row) require(v >= 0 && std::isfinite(v), ErrorCode::InvalidArgument, "entries must be nonnegative");
  }
  for (std::size_t k = 0; k < K; ++k) {
    double s = 0;
    for (std::size_t j = 0; j < J; ++j) s += a[j][k];
    require(s <= k_bound, ErrorCode::HypothesisFailed,
            "hypothesis failed: column " + std::to_string(k) + " sums to more than the bound");
  }
  Selection best;
  std::size_t best_count = 0;
  for (std::size_t j = 0; j < J; ++j) {
    std::size_t count = 0;
    for (std::size_t k = 0; k < K; ++k) count += a[j][k] <= eps;
    if (j == 0 || count > best_count) {
      best_count = count;
      best.j0 = j;
    }
  }
  for (std::size_t k = 0; k < K; ++k)
    if (a[best.j0][k] <= eps) best.columns.push_back(k);
  require(best.columns.size() >= min_card, ErrorCode::PreconditionFailed,
          "no row has the requested number of small entries");
  return best;
}

long long selection_guarantee(std::size_t rows, std::size_t cols, double k_bound, double eps) {
  // Per column at most ceil(K/eps) - 1 entries exceed eps; some row carries at
  // most the average share of those.
  const long long per_col = static_cast<long long>(std::ceil(k_bound / eps)) - 1;
  const long long bad = static_cast<long long>(cols) * std::max(0LL, per_col);
  return static_cast<long long>(cols) - bad / static_cast<long long>(rows);
}

namespace {

double inv(double q) { return std::isinf(q) ? 0.0 : 1 / q; }
double from_inv(double r) { return r == 0 ? kInfinity : 1 / r; }

struct ProfileCache {
  const PointCloudSpace& space;
  const ScalarField& u;
  std::map<double, EpProfile> cache;
  const EpProfile& at(double p) {
    auto it = cache.find(p);
    if (it == cache.end()) it = cache.emplace(p, ep_profile(space, u, p)).first;
    return it->second;
  }
};

struct Tally {
  InequalityResult r;
  double slack;
  void exact(double lhs, double rhs) {
    ++r.evaluations;
    if (lhs == 0) return;
    const double ratio = rhs > 0 ? lhs / rhs : kInfinity;
    r.worst_ratio = std::max(r.worst_ratio, ratio);
    if (!(lhs <= rhs * (1 + slack))) r.passed = false;
  }
  void measured(double lhs, double rhs) {
    ++r.evaluations;
    if (lhs == 0) return;
    r.worst_ratio = std::max(r.worst_ratio, rhs > 0 ? lhs / rhs : kInfinity);
  }
};

}  // namespace

std::vector<InequalityResult> inequality_suite(const PointCloudSpace& space, const std::vector<ScalarField>& corpus,
                                               const InequalityConfig& cfg) {
  require(!corpus.empty(), ErrorCode::InvalidArgument, "empty corpus");
  const Region region = corpus.front().region;
  const double R = resolve_radius(space, region, cfg.R);

  auto make = [&](const char* id, bool exact) {
    Tally t;
    t.r.id = id;
    t.r.exact = exact;
    t.slack = cfg.slack;
    return t;
  };
  Tally interp = make("BesovInterpolate", true);
  Tally interp_full = make("BesovInterpolate.full", true);
  Tally linf = make("BesovLinftyInterpolate", true);
  Tally decr = make("decreasingsmoothness", true);
  Tally incq = make("increasing-q", false);
  Tally zero = make("zerosmoothness", false);
  Tally haj_besov = make("HajlaszIsBesov", false);
  Tally besov_haj = make("BesovHaj", false);
  Tally embed = make("Besov-standardembeddings", false);

  MassExponents mx;
  bool have_mx = true;
  try {
    mx = estimate_mass_exponents(space, default_probe_schedule(space, region), region);
  } catch (const Error&) {
    have_mx = false;
  }

  for (const auto& u : corpus) {
    require(u.region == region, ErrorCode::InvalidArgument, "corpus fields must share a region");
    ProfileCache pc{space, u, {}};
    auto semi = [&](double a, double p, double q) { return besov_seminorm(pc.at(p), a, q, R); };
    auto full = [&](double a, double p, double q) { return pc.at(p).lp_norm + semi(a, p, q); };
    const double sup_u = lp_norm(space, u, kInfinity);

    for (double lam : cfg.lambdas)
      for (double a0 : cfg.alphas)
        for (double a1 : cfg.alphas)
          for (double p0 : cfg.ps)
            for (double p1 : cfg.ps)
              for (double q0 : cfg.qs)
                for (double q1 : cfg.qs) {
                  const double a = (1 - lam) * a0 + lam * a1;
                  const double p = from_inv((1 - lam) / p0 + lam / p1);
                  const double q = from_inv((1 - lam) * inv(q0) + lam * inv(q1));
                  interp.exact(semi(a, p, q), std::pow(semi(a0, p0, q0), 1 - lam) * std::pow(semi(a1, p1, q1), lam));
                  interp_full.exact(full(a, p, q), std::pow(full(a0, p0, q0), 1 - lam) * std::pow(full(a1, p1, q1), lam));
                }

    for (double lam : cfg.lambdas)
      for (double a : cfg.alphas)
        for (double p : cfg.ps)
          for (double q : cfg.qs)
            linf.exact(semi(lam * a, p / lam, q / lam), 2 * std::pow(sup_u, 1 - lam) * std::pow(semi(a, p, q), lam));

    std::vector<double> betas{0.0};
    for (double a : cfg.alphas) betas.push_back(a);
    for (double a : cfg.alphas)
      for (double b : betas) {
        if (!(b < a)) continue;
        for (double p : cfg.ps)
          for (double q : cfg.qs) {
            const double factor = std::isinf(q) ? std::pow(R, a - b)
                                                : std::pow(std::pow(R, (a - b) * q) / ((a - b) * q), 1 / q);
            decr.exact(semi(b, p, q), semi(a, p, kInfinity) * factor);
          }
      }

    for (double a : cfg.alphas)
      for (double p : cfg.ps)
        for (double q : cfg.qs)
          for (double qt : cfg.qs)
            if (qt > q) incq.measured(full(a, p, qt), full(a, p, q));

    for (double s : cfg.ps)
      for (double p : cfg.ps)
        for (double r : cfg.ps) {
          if (!(s < p && p < r)) continue;
          for (double a : cfg.alphas)
            for (double q : cfg.qs) {
              if (std::isinf(q)) continue;
              const double e1 = r * (p - s) / (p * (r - s)), e2 = s * (r - p) / (p * (r - s));
              zero.measured(semi(0, p, q), std::pow(lp_norm(space, u, r), e1) * std::pow(semi(a, s, kInfinity), e2));
            }
        }

    for (double a : cfg.alphas) {
      const ScalarField g = hajlasz_feasible_gradient(space, u, a);
      for (double p : cfg.ps) haj_besov.measured(semi(a, p, kInfinity), lp_norm(space, g, p));
      if (have_mx) {
        const ScalarField ga = hajlasz_averaged_gradient(space, u, a, mx.s, mx.c_s);
        for (double p : cfg.ps) besov_haj.measured(lp_norm(space, ga, p), semi(a, p, p));
        const double ubar = mean(space, u);
        ScalarField centred = u;
        for (double& v : centred.values) v -= ubar;
        for (double p : cfg.ps) {
          if (!(a * p < mx.s)) continue;
          const double pstar = p * mx.s / (mx.s - a * p);
          for (double q : cfg.qs)
            if (q <= p) embed.measured(lp_norm(space, centred, pstar), semi(a, p, q));
        }
      }
    }
  }
  return {interp.r, interp_full.r, linf.r, decr.r, incq.r, zero.r, haj_besov.r, besov_haj.r, embed.r};
}

}  // namespace metsob
