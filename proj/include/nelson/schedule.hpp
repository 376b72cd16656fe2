#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "nelson/types.hpp"

namespace nelson {

// Physical and scaling parameters of one experiment point. Everything is
// immutable after construction and freely shareable across workers.
struct ModelParams {
  double g = 0.0;        // coupling constant
  double kappa = 1.5;    // frequency separating UV and IR regimes, 1 < kappa < 2
  double beta = 1.2;     // UV scaling factor, 1 < beta < 2
  double gamma = 0.25;   // IR scaling factor, 0 < gamma < 1/2
  double zeta = 0.05;    // IR gap constant, 0 < zeta < 1/16
  double theta = 0.0625; // gap-subtraction constant, 0 < theta < 1/8
  Vec3 P = Vec3::Zero(); // total momentum of the fiber

  static constexpr double p_max = 0.25;
  static constexpr double delta = 0.5;  // exponent in the dressed sandwich diagnostic
};

struct ConstraintCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  bool fatal = false;  // violations of fatal constraints reject the config
  std::string detail;
};

struct ConstraintReport {
  std::vector<ConstraintCheck> checks;
  bool all_pass = true;
  bool fatal_violation = false;

  const ConstraintCheck* find(const std::string& name) const;
};

// Closed form of the IR smallness series sum_{j>=1} gamma^{j/4} (1+j),
// i.e. x/(1-x) + x/(1-x)^2 with x = gamma^{1/4}.
double ir_series_closed_form(double gamma);
double ir_series_partial_sum(double gamma, int terms);

// Pass/fail per parameter constraint. Fatal: finiteness, the basic ranges
// (kappa, beta, gamma, theta, zeta, |P|), and |g| <= beta-1. The IR
// smallness conditions |g| <= gamma^2 and the series bound are reported but
// non-fatal: they are sufficient conditions for the infrared theorems, and
// desk-scale diagnostics deliberately probe outside them.
ConstraintReport validate_params(const ModelParams& p);

// Renormalization counterterm: the closed radial form of
//   -g^2/(2 (2 pi)^3) * Integral_{kappa<|k|<Lambda} dk / (|k| (|k|^2/2 + |k|))
// which evaluates to -(g^2 / (2 pi^2)) ln((Lambda+2)/(kappa+2)).
double vself(double lambda_uv, double kappa, double g);

// Contour for the spectral projections: a circle of given radius around
// center+shift with n_quad uniformly spaced quadrature nodes.
struct Contour {
  Complex center{0.0, 0.0};
  double radius = 0.0;
  Complex shift{0.0, 0.0};
  int n_quad = 64;

  std::vector<Complex> nodes() const;
};

// Cutoff sequences, gap bounds and contours for one parameter set.
class CutoffSchedule {
 public:
  CutoffSchedule(ModelParams params, double rate_constant_K = 5.0,
                 std::optional<double> alpha_bar = std::nullopt,
                 int n_quad = 64);

  const ModelParams& params() const { return params_; }

  double sigma(int n) const;  // kappa * beta^n
  double tau(int m) const;    // kappa * gamma^m

  // Gap-bound sequence xi_n = (kappa/8)(1 - sum_{j<=n} dxi_j) with
  // dxi_n = (beta-1)^2 n / (2 beta beta^n); xi_0 = kappa/2 seeds the
  // induction.
  double gap_decrement(int n) const;
  double gap_bound_uv(int n) const;

  double alpha() const;        // -ln gamma / ln beta
  double alpha_bar() const;    // configured joint-scaling floor
  double rate_constant_K() const { return K_; }
  int alpha_min() const;       // smallest admissible integer joint scaling
  int joint_scaling(int m, int alpha_prime) const { return alpha_prime * m; }

  Contour contour_uv(int n, double e_prev) const;
  Contour contour_ir(int m, double e_prev) const;
  Contour contour_ir_shifted(int m, double e_prev, Complex c_shift) const;

  double vself_uv(int n) const;  // vself(sigma_n, kappa, g)

  int n_quad() const { return n_quad_; }

 private:
  ModelParams params_;
  double K_;
  double alpha_bar_;
  int n_quad_;
};

}  // namespace nelson
