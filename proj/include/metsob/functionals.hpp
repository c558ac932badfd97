#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "metsob/space.hpp"

namespace metsob {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct BesovParams {
  double alpha = 0.5;
  double p = 2;
  double q = 2;  // kInfinity is allowed
  double R = 0;  // 0 selects 2 * diam of the field's region
};

struct NormPair {
  double seminorm = 0;
  double norm = 0;  // L^p norm plus seminorm
};

// (sum_i w_i |f_i|^p)^(1/p); p = infinity gives the max of |f|.
double lp_norm(const PointCloudSpace& space, const ScalarField& f, double p);
double mean(const PointCloudSpace& space, const ScalarField& f);
void check_field(const PointCloudSpace& space, const ScalarField& f);

// t -> E_p(u,t) is a step function: value[k] on (breaks[k], breaks[k+1]] and
// value.back() beyond breaks.back(); zero on (0, breaks[0]].
struct EpProfile {
  std::vector<double> breaks;
  std::vector<double> value;
  double lp_norm = 0;
  double p = 2;
  double eval(double t) const;
};

EpProfile ep_profile(const PointCloudSpace& space, const ScalarField& u, double p);
// Direct evaluation by ball queries (no pair sweep).
double ep_functional(const PointCloudSpace& space, const ScalarField& u, double t, double p);

double default_besov_radius(const PointCloudSpace& space, Region region);
// Seminorm from a profile; R must be positive.
double besov_seminorm(const EpProfile& prof, double alpha, double q, double R);
NormPair besov_norm_gks(const PointCloudSpace& space, const ScalarField& u, const BesovParams& params);
// Midpoint rule in log t with `nodes_per_octave` nodes per halving of t, using
// ep_functional at every node.
NormPair besov_norm_gks_quadrature(const PointCloudSpace& space, const ScalarField& u, const BesovParams& params,
                                   int nodes_per_octave = 40);
NormPair besov_norm_bp(const PointCloudSpace& space, const ScalarField& u, double alpha, double p, double R = 0);

ScalarField hajlasz_feasible_gradient(const PointCloudSpace& space, const ScalarField& u, double alpha);
ScalarField hajlasz_averaged_gradient(const PointCloudSpace& space, const ScalarField& u, double alpha, double Q,
                                      double c_Q);
double verify_hajlasz(const PointCloudSpace& space, const ScalarField& u, const ScalarField& g, double alpha);

struct PiViolation {
  double max_violation = -kInfinity;
  std::size_t center = 0;
  double radius = 0;
};

// Dyadic radii 2*spacing*2^k up to the interior diameter.
std::vector<double> pi_family_radii(const PointCloudSpace& space);
PiViolation verify_pi(const PointCloudSpace& space, const ScalarField& u, const ScalarField& g, double q,
                      double lambda = 1, std::size_t center_stride = 1);
ScalarField infimal_pi_transform(const PointCloudSpace& space, const ScalarField& g, double q,
                                 std::size_t center_stride = 1);
ScalarField lip_field(const PointCloudSpace& space, const ScalarField& u, double rho_c);
// Pairwise Lipschitz constant of a field over its region.
double lipschitz_constant(const PointCloudSpace& space, const ScalarField& u);
ScalarField frac_maximal(const PointCloudSpace& space, const ScalarField& f, double alpha, double p);
// sup_lambda lambda * H({M > lambda})^exponent over the values of a boundary field.
double weak_quasinorm(const PointCloudSpace& space, const ScalarField& m, double exponent);

struct Selection {
  std::size_t j0 = 0;
  std::vector<std::size_t> columns;
};

Selection select_small_row(const std::vector<std::vector<double>>& a, double k_bound, double eps, std::size_t min_card);
// Lower bound on |I| implied by the column-sum hypothesis for a J x K matrix.
long long selection_guarantee(std::size_t rows, std::size_t cols, double k_bound, double eps);

struct InequalityConfig {
  std::vector<double> alphas{0.25, 0.5, 0.75};
  std::vector<double> ps{1, 2, 3};
  std::vector<double> qs{1, 2, 4, kInfinity};
  std::vector<double> lambdas{0.25, 0.5, 0.75};
  double R = 0;  // 0 selects 2 * diam
  double slack = 1e-9;
};

struct InequalityResult {
  std::string id;
  bool exact = false;  // sharp-constant inequality (constant 1 or the computed bound)
  double worst_ratio = 0;
  std::size_t evaluations = 0;
  bool passed = true;  // only meaningful for exact entries
};

std::vector<InequalityResult> inequality_suite(const PointCloudSpace& space, const std::vector<ScalarField>& corpus,
                                               const InequalityConfig& config);

}  // namespace metsob
