#include "metsob/trace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace metsob {

namespace {

double loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dx = std::log(x[k]) - mx;
    sxy += dx * (std::log(y[k]) - my);
    sxx += dx * dx;
  }
  return sxx > 0 ? sxy / sxx : std::nan("");
}

double boundary_lp(const PointCloudSpace& space, const std::vector<double>& v, double p) {
  double s = 0;
  for (std::size_t k = 0; k < v.size(); ++k) s += space.weight_local(Region::Boundary, k) * std::pow(std::abs(v[k]), p);
  return std::pow(s, 1 / p);
}

}  // namespace

double trace_at_radius(const PointCloudSpace& space, const ScalarField& u, std::size_t boundary_id, double r) {
  check_field(space, u);
  require(u.region == Region::Interior, ErrorCode::InvalidArgument, "u must be an interior field");
  require(boundary_id < space.size() && space.point(boundary_id).region == Region::Boundary, ErrorCode::NoSuchPoint,
          "no such boundary point: " + std::to_string(boundary_id));
  require(r > 0, ErrorCode::InvalidArgument, "radius must be positive");
  double m = 0, s = 0;
  space.for_each_in_ball(Ball::at(boundary_id, r), Region::Interior, [&](std::size_t id, double) {
    m += space.weight(id);
    s += space.weight(id) * u.values[space.local(id)];
  });
  require(m > 0, ErrorCode::RadiusBelowResolution, "radius below resolution: ball contains no interior point");
  return s / m;
}

ScalarField trace_average(const PointCloudSpace& space, const ScalarField& u, double r) {
  check_field(space, u);
  require(u.region == Region::Interior, ErrorCode::InvalidArgument, "u must be an interior field");
  const auto& bd = space.ids(Region::Boundary);
  ScalarField out{Region::Boundary, std::vector<double>(bd.size(), 0.0)};
  std::vector<char> empty(bd.size(), 0);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::size_t k = 0; k < bd.size(); ++k) {
    double m = 0, s = 0;
    space.for_each_in_ball(Ball::at(bd[k], r), Region::Interior, [&](std::size_t id, double) {
      m += space.weight(id);
      s += space.weight(id) * u.values[space.local(id)];
    });
    if (m > 0) {
      out.values[k] = s / m;
    } else {
      empty[k] = 1;
    }
  }
  for (char e : empty)
    require(!e, ErrorCode::RadiusBelowResolution, "radius below resolution: ball contains no interior point");
  return out;
}

TraceSchedule trace_schedule(const PointCloudSpace& space, double R, int k_max) {
  require(k_max >= 0, ErrorCode::InvalidArgument, "k_max must be nonnegative");
  if (R == 0) R = 2 * space.diam(Region::Interior);
  require(R > 0, ErrorCode::InvalidArgument, "R must be positive");
  const double floor_r = 2 * space.boundary_adjacent_spacing();
  TraceSchedule s;
  for (int k = 0; k <= k_max; ++k) {
    const double r = std::ldexp(R, -k);
    if (r < floor_r) {
      s.truncated = true;
      break;
    }
    s.radii.push_back(r);
  }
  require(!s.radii.empty(), ErrorCode::RadiusBelowResolution,
          "radius below resolution: the schedule starts below twice the boundary-adjacent spacing");
  return s;
}

double smallest_trace_radius(const PointCloudSpace& space, double R) { return trace_schedule(space, R, 1000).radii.back(); }

TraceReport trace_field(const PointCloudSpace& space, const ScalarField& u, double p, int k_max, double R,
                        const std::vector<double>& alphas) {
  check_field(space, u);
  require(u.region == Region::Interior, ErrorCode::InvalidArgument, "u must be an interior field");
  require(p >= 1 && std::isfinite(p), ErrorCode::InvalidArgument, "p must be a finite real >= 1");
  const TraceSchedule sched = trace_schedule(space, R, k_max);
  TraceReport rep;
  rep.radii = sched.radii;
  rep.truncated = sched.truncated;
  for (double r : rep.radii) rep.averages.push_back(trace_average(space, u, r));
  for (std::size_t k = 1; k < rep.radii.size(); ++k) {
    std::vector<double> diff(rep.averages[k].values.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = rep.averages[k - 1].values[i] - rep.averages[k].values[i];
    rep.cauchy_gaps.push_back(boundary_lp(space, diff, p));
  }
  rep.trace = rep.averages.back();

  // Fit in the range r <= diam/2 when it holds at least two positive gaps.
  std::vector<double> xs, ys, xa, ya;
  const double cut = space.diam(Region::Interior) / 2;
  for (std::size_t k = 0; k < rep.cauchy_gaps.size(); ++k) {
    if (!(rep.cauchy_gaps[k] > 0)) continue;
    xa.push_back(rep.radii[k + 1]);
    ya.push_back(rep.cauchy_gaps[k]);
    if (rep.radii[k + 1] <= cut) {
      xs.push_back(rep.radii[k + 1]);
      ys.push_back(rep.cauchy_gaps[k]);
    }
  }
  if (xs.size() >= 2) {
    rep.fitted_rate = loglog_fit(xs, ys);
  } else if (xa.size() >= 2) {
    rep.fitted_rate = loglog_fit(xa, ya);
  } else {
    rep.fitted_rate = std::nan("");
  }

  if (!alphas.empty() && space.count(Region::Boundary) > 1) {
    const EpProfile prof = ep_profile(space, rep.trace, p);
    const double Rb = default_besov_radius(space, Region::Boundary);
    for (double a : alphas) rep.besov_seminorms.push_back({a, besov_seminorm(prof, a, kInfinity, Rb)});
  }
  return rep;
}

TraceBesovReport trace_besov_report(const PointCloudSpace& space, const ScalarField& u, const ScalarField& g, double p,
                                    double theta, const std::vector<double>& alpha_offsets) {
  require(theta > 0, ErrorCode::InvalidArgument, "theta must be positive");
  require(p > theta, ErrorCode::SupercriticalTrace,
          "supercritical trace only: p <= theta, use the weighted trace for this regime");
  check_field(space, g);
  require(g.region == Region::Interior, ErrorCode::InvalidArgument, "g must be an interior field");
  TraceBesovReport rep;
  rep.smoothness = 1 - theta / p;
  rep.trace = trace_field(space, u, p, 1000, 0, {}).trace;
  const EpProfile prof = ep_profile(space, rep.trace, p);
  const double Rb = default_besov_radius(space, Region::Boundary);
  rep.seminorm_inf = besov_seminorm(prof, rep.smoothness, kInfinity, Rb);
  rep.seminorm_pp = besov_seminorm(prof, rep.smoothness, p, Rb);
  for (double off : alpha_offsets) {
    const double a = rep.smoothness + off;
    require(a >= 0 && a <= 1, ErrorCode::InvalidArgument, "offset smoothness must stay in [0,1]");
    rep.extra.push_back({a, besov_seminorm(prof, a, kInfinity, Rb)});
  }

  const ScalarField M = frac_maximal(space, g, theta, p);
  rep.maximal_weak_norm = weak_quasinorm(space, M, 1 / p);
  const auto& bd = space.ids(Region::Boundary);
  const std::size_t n = bd.size();
  double worst = 0;
#pragma omp parallel for schedule(dynamic, 16) reduction(max : worst)
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double diff = std::abs(rep.trace.values[i] - rep.trace.values[j]);
      if (diff == 0) continue;
      const double den = std::pow(space.dist(bd[i], bd[j]), rep.smoothness) * (M.values[i] + M.values[j]);
      worst = std::max(worst, den > 0 ? diff / den : kInfinity);
    }
  rep.hajlasz_ratio = worst;
  const double den = lp_norm(space, u, p) + lp_norm(space, g, p);
  const double num = prof.lp_norm + rep.seminorm_inf;
  rep.norm_ratio = den > 0 ? num / den : (num > 0 ? kInfinity : 0.0);
  return rep;
}

double TraceWeight::operator()(double t) const {
  if (kind == Kind::LogPower) {
    if (!(t > 0)) return kInfinity;
    const double l = std::log(scale / t);
    return l > 1 ? std::pow(l, exponent) : 1.0;
  }
  if (t <= table.front().first) return table.front().second;
  if (t >= table.back().first) return table.back().second;
  const auto it = std::upper_bound(table.begin(), table.end(), t,
                                   [](double v, const std::pair<double, double>& e) { return v < e.first; });
  const auto& [t1, w1] = *it;
  const auto& [t0, w0] = *(it - 1);
  return w0 + (w1 - w0) * (t - t0) / (t1 - t0);
}

void TraceWeight::validate() const {
  if (kind == Kind::LogPower) {
    require(scale > 0 && exponent >= 0, ErrorCode::InvalidArgument, "weight needs a positive scale and exponent >= 0");
    return;
  }
  require(!table.empty(), ErrorCode::InvalidArgument, "empty weight table");
  for (std::size_t k = 0; k < table.size(); ++k) {
    require(table[k].second >= 1, ErrorCode::InvalidArgument, "weight values must be >= 1");
    if (k > 0) {
      require(table[k].first > table[k - 1].first, ErrorCode::InvalidArgument, "weight table knots must increase in t");
      require(table[k].second <= table[k - 1].second, ErrorCode::InvalidArgument,
              "non-monotone weight: w must be decreasing in t");
    }
  }
}

std::string TraceWeight::describe() const {
  std::ostringstream os;
  if (kind == Kind::LogPower) {
    os << "max(1, log(" << scale << "/t)^" << exponent << ")";
  } else {
    os << "table(" << table.size() << " knots)";
  }
  return os.str();
}

WeightedTraceReport weighted_trace(const PointCloudSpace& space, const ScalarField& u, const ScalarField& g, double p,
                                   const TraceWeight& weight, double theta) {
  check_field(space, u);
  check_field(space, g);
  require(u.region == Region::Interior && g.region == Region::Interior, ErrorCode::InvalidArgument,
          "u and g must be interior fields");
  require(std::abs(theta - p) <= 0.2, ErrorCode::PreconditionFailed,
          "weighted trace needs theta = p (within 0.2)");
  TraceWeight w = weight;
  if (w.kind == TraceWeight::Kind::LogPower && w.scale == 0) w.scale = 2 * space.diam(Region::Interior);
  w.validate();

  WeightedTraceReport rep;
  rep.weighted_gradient = g;
  for (std::size_t k = 0; k < g.values.size(); ++k)
    rep.weighted_gradient.values[k] = g.values[k] * w(space.dist_to_boundary(k));
  rep.weighted_norm = lp_norm(space, rep.weighted_gradient, p);
  rep.trace = trace_average(space, u, smallest_trace_radius(space));
  rep.mean_u = mean(space, u);
  std::vector<double> dev(rep.trace.values.size());
  for (std::size_t k = 0; k < dev.size(); ++k) dev[k] = rep.trace.values[k] - rep.mean_u;
  rep.deviation = boundary_lp(space, dev, p);
  const double tol = 1e-12 * std::max(1.0, std::abs(rep.mean_u)) *
                     std::pow(std::max(space.total_mass(Region::Boundary), 1e-300), 1 / p);
  rep.exact_match = rep.deviation <= tol;
  if (rep.weighted_norm > 0) {
    rep.ratio = rep.deviation / rep.weighted_norm;
  } else {
    rep.ratio = rep.exact_match ? 0.0 : kInfinity;
  }
  return rep;
}

LocalTraceResult local_trace_estimate(const PointCloudSpace& space, const ScalarField& trace, const ScalarField& u,
                                      const ScalarField& g, const LocalTraceParams& prm, const Ball& ball) {
  check_field(space, trace);
  check_field(space, u);
  check_field(space, g);
  require(trace.region == Region::Boundary, ErrorCode::InvalidArgument, "trace must be a boundary field");
  require(u.region == Region::Interior && g.region == Region::Interior, ErrorCode::InvalidArgument,
          "u and g must be interior fields");
  require(ball.center_id && space.point(*ball.center_id).region == Region::Boundary, ErrorCode::InvalidArgument,
          "ball must be centred at a boundary point");
  require(prm.p >= 1 && prm.theta < prm.p && prm.p < prm.s, ErrorCode::PreconditionFailed,
          "local estimate needs theta < p < s and p >= 1");
  require(prm.q > 0 && prm.q < prm.p, ErrorCode::PreconditionFailed, "local estimate needs q < p");
  LocalTraceResult res;
  res.p_star = prm.p * (prm.s - prm.theta) / (prm.s - prm.p);
  require(prm.p_tilde > prm.p && prm.p_tilde < res.p_star, ErrorCode::PreconditionFailed,
          "local estimate needs p < p~ < p*");

  double m = 0, su = 0, sg = 0;
  space.for_each_in_ball(ball, Region::Interior, [&](std::size_t id, double) {
    const double w = space.weight(id);
    m += w;
    su += w * u.values[space.local(id)];
    sg += w * std::pow(g.values[space.local(id)], prm.p);
  });
  require(m > 0, ErrorCode::RadiusBelowResolution, "radius below resolution: ball contains no interior point");
  const double ub = su / m;
  double sl = 0;
  space.for_each_in_ball(ball, Region::Boundary, [&](std::size_t id, double) {
    sl += space.weight(id) * std::pow(std::abs(trace.values[space.local(id)] - ub), prm.p_tilde);
  });
  res.lhs = std::pow(sl, 1 / prm.p_tilde);
  const double expo = (1 / prm.p_tilde - 1 / res.p_star) * (prm.s - prm.theta);
  res.rhs = std::pow(ball.radius, expo) * std::pow(sg, 1 / prm.p);
  res.ratio = res.rhs > 0 ? res.lhs / res.rhs : (res.lhs > 0 ? kInfinity : 0.0);
  return res;
}

DivergenceReport detect_divergence(const PointCloudSpace& space, const ScalarField& u, double eps, double R,
                                   int k_max) {
  require(eps > 0, ErrorCode::InvalidArgument, "eps must be positive");
  if (R == 0) R = space.diam(Region::Interior) / 2;
  const TraceSchedule sched = trace_schedule(space, R, k_max);
  DivergenceReport rep;
  rep.radii = sched.radii;
  std::vector<ScalarField> avg;
  const double H = space.total_mass(Region::Boundary);
  for (double r : rep.radii) {
    avg.push_back(trace_average(space, u, r));
    double s = 0;
    for (std::size_t k = 0; k < avg.back().values.size(); ++k)
      s += space.weight_local(Region::Boundary, k) * avg.back().values[k];
    rep.mean_average.push_back(s / H);
  }
  const std::size_t nb = space.count(Region::Boundary);
  std::size_t inc = 0;
  for (std::size_t z = 0; z < nb; ++z) {
    bool up = rep.radii.size() > 1;
    for (std::size_t k = 1; k < avg.size() && up; ++k) up = avg[k].values[z] > avg[k - 1].values[z];
    inc += up;
  }
  rep.increasing_fraction = nb ? static_cast<double>(inc) / nb : 0.0;

  // Relative least squares: minimise sum (1 - c L_k / v_k)^2.
  double a = 0, b = 0;
  std::vector<double> L(rep.radii.size());
  for (std::size_t k = 0; k < L.size(); ++k) {
    L[k] = std::pow(std::log(std::max(std::exp(1.0) / rep.radii[k], 1.0 + 1e-12)), eps);
    const double x = L[k] / rep.mean_average[k];
    a += x;
    b += x * x;
  }
  rep.fit_c = b > 0 ? a / b : 0.0;
  rep.fit_residual = 0;
  for (std::size_t k = 0; k < L.size(); ++k)
    rep.fit_residual =
        std::max(rep.fit_residual, std::abs(rep.mean_average[k] - rep.fit_c * L[k]) / std::abs(rep.mean_average[k]));
  rep.no_trace = rep.radii.size() >= 3 && rep.increasing_fraction >= 0.9 && rep.fit_residual <= 0.1;
  return rep;
}

}  // namespace metsob
