#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "metsob/functionals.hpp"
#include "metsob/space.hpp"

namespace metsob {

// T_r u(z): mu-weighted mean of u over B(z,r) intersected with the interior.
double trace_at_radius(const PointCloudSpace& space, const ScalarField& u, std::size_t boundary_id, double r);
// T_r u at every boundary point.
ScalarField trace_average(const PointCloudSpace& space, const ScalarField& u, double r);

// Dyadic radii R * 2^-k, k = 0..k_max, cut off below twice the boundary-adjacent
// spacing. R = 0 selects 2 * diam of the interior.
struct TraceSchedule {
  std::vector<double> radii;
  bool truncated = false;  // k_max asked for radii below the resolution
};
TraceSchedule trace_schedule(const PointCloudSpace& space, double R, int k_max);
// Smallest radius of the full schedule starting at R (0 for the default).
double smallest_trace_radius(const PointCloudSpace& space, double R = 0);

struct TraceReport {
  ScalarField trace;                 // T at the smallest radius of the schedule
  std::vector<double> radii;
  std::vector<double> cauchy_gaps;   // ||T_{r_{k-1}} u - T_{r_k} u||_p, k = 1..
  double fitted_rate = 0;            // log-log slope of the gaps against r_k; NaN if undetermined
  std::vector<std::pair<double, double>> besov_seminorms;  // (alpha, B^alpha_{p,inf} seminorm of the trace)
  bool truncated = false;
  std::vector<ScalarField> averages;  // T_{r_k} u for every radius
};

TraceReport trace_field(const PointCloudSpace& space, const ScalarField& u, double p, int k_max, double R = 0,
                        const std::vector<double>& alphas = {0.25, 0.5, 0.75});

struct TraceBesovReport {
  ScalarField trace;
  double smoothness = 0;  // 1 - theta/p
  double seminorm_inf = 0;  // B^{1-theta/p}_{p,inf}
  double seminorm_pp = 0;   // B^{1-theta/p}_{p,p}
  std::vector<std::pair<double, double>> extra;  // (alpha, B^alpha_{p,inf}) for the requested offsets
  double hajlasz_ratio = 0;  // max |Tu(z)-Tu(w)| / (d^s (Mg(z) + Mg(w)))
  double norm_ratio = 0;     // ||Tu||_{B^s_{p,inf}} / (||u||_p + ||g||_p)
  double maximal_weak_norm = 0;  // ||M_{theta,p} g||_{weak L^p}
};

// Requires p > theta; theta >= p raises SupercriticalTrace.
TraceBesovReport trace_besov_report(const PointCloudSpace& space, const ScalarField& u, const ScalarField& g, double p,
                                    double theta, const std::vector<double>& alpha_offsets = {});

// Decreasing weight w >= 1 for the critical case theta = p.
struct TraceWeight {
  enum class Kind { LogPower, Table };
  Kind kind = Kind::LogPower;
  double scale = 0;     // LogPower: w(t) = max(1, log(scale/t)^exponent); 0 means 2 * diam
  double exponent = 1.25;
  std::vector<std::pair<double, double>> table;  // (t, w) knots, piecewise linear, constant outside
  double operator()(double t) const;
  // Throws InvalidArgument for an increasing or sub-unit table.
  void validate() const;
  std::string describe() const;
};

struct WeightedTraceReport {
  ScalarField weighted_gradient;  // g(x) * w(dist(x, boundary))
  double weighted_norm = 0;       // ||g~||_{L^p}
  ScalarField trace;
  double mean_u = 0;
  double deviation = 0;           // ||Tu - u_Omega||_{L^p(boundary)}
  double ratio = 0;
  bool exact_match = false;       // Tu == u_Omega to rounding; ratio reported as 0
  bool regime_ok = true;          // |theta - p| <= 0.2
};

WeightedTraceReport weighted_trace(const PointCloudSpace& space, const ScalarField& u, const ScalarField& g, double p,
                                   const TraceWeight& weight, double theta);

struct LocalTraceParams {
  double p = 1.5;
  double q = 1.25;
  double p_tilde = 2;
  double s = 2;      // lower mass exponent
  double theta = 1;  // upper codimension exponent
};

struct LocalTraceResult {
  double lhs = 0;  // ||Tu - u_{B cap Omega}||_{L^{p~}(B cap boundary)}
  double rhs = 0;  // rad^{(1/p~ - 1/p*)(s - theta)} ||g||_{L^p(B cap Omega)}
  double ratio = 0;
  double p_star = 0;
};

// `trace` is a boundary field (usually trace_field(...).trace); the ball must be
// centred at a boundary point.
LocalTraceResult local_trace_estimate(const PointCloudSpace& space, const ScalarField& trace, const ScalarField& u,
                                      const ScalarField& g, const LocalTraceParams& params, const Ball& ball);

struct DivergenceReport {
  std::vector<double> radii;
  std::vector<double> mean_average;  // H-weighted mean of T_r u over the boundary
  double increasing_fraction = 0;    // boundary points where T_r u grows as r shrinks
  double fit_c = 0;                  // best c in c * log(e/r)^eps
  double fit_residual = 0;           // max relative residual of that fit
  bool no_trace = false;
};

// Ball averages along R * 2^-k (R = 0 selects diam/2 of the interior).
DivergenceReport detect_divergence(const PointCloudSpace& space, const ScalarField& u, double eps, double R = 0,
                                   int k_max = 64);

}  // namespace metsob
