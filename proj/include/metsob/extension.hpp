#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "metsob/space.hpp"
#include "metsob/whitney.hpp"

namespace metsob {

// Linear extension Ef = sum_b a_b phi_b with a_b the boundary mean of f over the
// patch B(anchor_b, r_b). Patches and partition weights are computed once.
class BesovExtension {
 public:
  BesovExtension(const PointCloudSpace& space, const WhitneyCover& cover);
  ScalarField apply(const ScalarField& f) const;
  std::vector<double> patch_averages(const ScalarField& f) const;
  const PartitionOfUnity& partition() const { return pu_; }
  const std::vector<std::vector<std::size_t>>& patches() const { return patches_; }  // boundary local indices

 private:
  const PointCloudSpace* space_;
  const WhitneyCover* cover_;
  PartitionOfUnity pu_;
  std::vector<std::vector<std::size_t>> patches_;
};

ScalarField extend_besov(const PointCloudSpace& space, const WhitneyCover& cover, const ScalarField& f);

struct ShellEstimate {
  double ball_lhs = 0;    // int_{B(z,r) cap Omega(rho)} |F|^p
  double ball_rhs = 0;    // min(r,rho)^vartheta int_{B(z,2^8 r) cap boundary} |f|^p
  double shell_lhs = 0;   // int_{Omega(rho)} |F|^p
  double shell_rhs = 0;   // rho^vartheta int_boundary |f|^p
};

// F is the extension of f (pass extend_besov's output); z is a boundary id.
ShellEstimate shell_estimates(const PointCloudSpace& space, const ScalarField& F, const ScalarField& f, std::size_t z,
                              double r, double rho, double p, double vartheta);

// Radius used for discrete pointwise Lipschitz constants: 1.5x the interior spacing.
double lip_radius(const PointCloudSpace& space);

struct GradientReport {
  ScalarField F;
  ScalarField lip_F;
  double lip_norm = 0;         // ||Lip F||_{L^p}
  double besov_norm = 0;       // ||f||_{B^{1-vartheta/p}_{p,p}}
  double ratio = 0;            // lip_norm / besov_norm
  double lp_ratio = 0;         // ||F||_p / (diam^{vartheta/p} ||f||_p)
  double pointwise_ratio = 0;  // max over balls and members of Lip F(x) r / (mean-mean |f(z)-f(w)| over U*)
};

// Requires p >= max(1, vartheta).
GradientReport extension_gradient_report(const PointCloudSpace& space, const WhitneyCover& cover,
                                         const ScalarField& f, double p, double vartheta);

// ||Lip F||^p_{L^p(Omega(rho))} / (mu(Omega(rho)) LIP(f)^p); NaN when the layer is empty.
double lip_layer_ratio(const PointCloudSpace& space, const ScalarField& lip_F, double rho, double lip_f, double p);

struct LipschitzStep {
  ScalarField f;    // boundary field f_k
  double L = 0;     // chosen constant (0 for f_1)
  double lip = 0;   // pairwise Lipschitz constant of f_k
};

// Infimal convolution f^L(z) = min_w f(w) + L d(z,w).
ScalarField inf_convolution(const PointCloudSpace& space, const ScalarField& f, double L);

// f_1 = 0; for k >= 2 the smallest power-of-two L with ||f^L - f||_p <= 2^-k ||f||_p.
std::vector<LipschitzStep> lipschitz_approximation(const PointCloudSpace& space, const ScalarField& f, double p,
                                                   int k_max);

// rho_k for k = 1..approx.size()-1 (rho_k pairs with LIP(f_{k+1})).
std::vector<double> layer_schedule(const PointCloudSpace& space, const std::vector<LipschitzStep>& approx,
                                   double f_norm);

struct LayerRow {
  int k = 0;
  double rho = 0;
  double L = 0;      // LIP(f_{k+1})
  double step = 0;   // ||f_{k+1} - f_k||_p
};

struct ExtensionReport {
  ScalarField F;
  ScalarField lip_F;
  std::vector<std::pair<std::string, double>> norm_ratios;
  double roundtrip_error = 0;
  std::vector<LayerRow> layers;
  bool schedule_ok = true;   // rho halving, step bound and budget all hold
  bool truncated = false;    // stopped at k_max with a nonzero tail
  bool regime_warning = false;
};

// theta < 0 skips the theta = p regime check.
ExtensionReport extend_lp(const PointCloudSpace& space, const WhitneyCover& cover, const ScalarField& f, double p,
                          int k_max, double theta = -1);

// Cutoff psi_k = clamp((rho_k - dist) / (rho_k - rho_{k+1}), 0, 1) at every interior point.
std::vector<double> layer_cutoff(const PointCloudSpace& space, double rho_k, double rho_next);

enum class ExtensionMode { Besov, Lp };

// ||T(Ef) - f||_{L^p(boundary)} with T at the smallest resolvable radius.
double roundtrip_error(const PointCloudSpace& space, const WhitneyCover& cover, const ScalarField& f, double p,
                       ExtensionMode mode, int k_max = 40);

}  // namespace metsob
