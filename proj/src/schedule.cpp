#include "nelson/schedule.hpp"

#include <cmath>

namespace nelson {

const ConstraintCheck* ConstraintReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

double ir_series_closed_form(double gamma) {
  double x = std::pow(gamma, 0.25);
  return x / (1.0 - x) + x / ((1.0 - x) * (1.0 - x));
}

double ir_series_partial_sum(double gamma, int terms) {
  double sum = 0.0;
  for (int j = 1; j <= terms; ++j) sum += std::pow(gamma, 0.25 * j) * (1.0 + j);
  return sum;
}

namespace {

void add_check(ConstraintReport& r, std::string name, double lhs, double rhs,
               bool pass, bool fatal, std::string detail = {}) {
  r.checks.push_back({std::move(name), lhs, rhs, pass, fatal, std::move(detail)});
  if (!pass) {
    r.all_pass = false;
    if (fatal) r.fatal_violation = true;
  }
}

}  // namespace

ConstraintReport validate_params(const ModelParams& p) {
  ConstraintReport r;

  const double fields[] = {p.g,      p.kappa, p.beta, p.gamma,
                           p.zeta,   p.theta, p.P.x(), p.P.y(), p.P.z()};
  const char* names[] = {"g", "kappa", "beta", "gamma", "zeta", "theta",
                         "P_x", "P_y", "P_z"};
  for (int i = 0; i < 9; ++i) {
    if (!std::isfinite(fields[i]))
      throw DomainError(std::string("validate_params: non-finite field ") + names[i]);
  }

  add_check(r, "kappa_range", p.kappa, 2.0, p.kappa > 1.0 && p.kappa < 2.0, true,
            "1 < kappa < 2");
  add_check(r, "beta_range", p.beta, 2.0, p.beta > 1.0 && p.beta < 2.0, true,
            "1 < beta < 2");
  add_check(r, "gamma_range", p.gamma, 0.5, p.gamma > 0.0 && p.gamma < 0.5, true,
            "0 < gamma < 1/2");
  add_check(r, "momentum_ball", p.P.norm(), ModelParams::p_max,
            p.P.norm() <= ModelParams::p_max, true, "|P| <= 1/4");
  add_check(r, "theta_range", p.theta, 0.125, p.theta > 0.0 && p.theta < 0.125,
            true, "0 < theta < 1/8");
  add_check(r, "zeta_range", p.zeta, 1.0 / 16.0,
            p.zeta > 0.0 && p.zeta < 1.0 / 16.0, true, "0 < zeta < 1/16");
  add_check(r, "zeta_gap_margin", 2.0 * p.zeta, 1.0 - p.theta - 0.75,
            1.0 - p.theta - 0.75 >= 2.0 * p.zeta, true,
            "1 - theta - 3/4 >= 2 zeta");
  add_check(r, "g_le_beta_minus_1", std::abs(p.g), p.beta - 1.0,
            std::abs(p.g) <= p.beta - 1.0, true, "|g| <= beta - 1");

  // IR smallness conditions: sufficient for the deep-infrared theorems,
  // reported but not enforced so the admissible region can be mapped.
  add_check(r, "g_le_gamma_sq", std::abs(p.g), p.gamma * p.gamma,
            std::abs(p.g) <= p.gamma * p.gamma, false, "|g| <= gamma^2");
  if (p.gamma > 0.0 && p.gamma < 1.0) {
    double closed = ir_series_closed_form(p.gamma);
    double partial = ir_series_partial_sum(p.gamma, 200);
    bool consistent = std::abs(closed - partial) <= 1e-12 + 1e-6 * std::abs(closed);
    add_check(r, "ir_series_le_half", closed, 0.5, closed <= 0.5, false,
              consistent ? "sum gamma^{j/4}(1+j) <= 1/2"
                         : "sum gamma^{j/4}(1+j) <= 1/2 (partial-sum cross-check drifted)");
  }

  return r;
}

double vself(double lambda_uv, double kappa, double g) {
  if (!(lambda_uv > kappa))
    throw DomainError("vself: need Lambda > kappa");
  const double pi = 3.14159265358979323846;
  return -(g * g / (2.0 * pi * pi)) * std::log((lambda_uv + 2.0) / (kappa + 2.0));
}

std::vector<Complex> Contour::nodes() const {
  std::vector<Complex> zs;
  zs.reserve(n_quad);
  const double two_pi = 6.28318530717958647692;
  for (int j = 0; j < n_quad; ++j) {
    double th = two_pi * j / n_quad;
    zs.push_back(center + shift + radius * Complex(std::cos(th), std::sin(th)));
  }
  return zs;
}

CutoffSchedule::CutoffSchedule(ModelParams params, double rate_constant_K,
                               std::optional<double> alpha_bar, int n_quad)
    : params_(params), K_(rate_constant_K), n_quad_(n_quad) {
  if (K_ < 5.0) throw DomainError("CutoffSchedule: rate constant K must be >= 5");
  double first = std::abs(6.0 * std::log(K_) - std::log(params_.gamma)) /
                 std::log(params_.beta);
  alpha_bar_ = alpha_bar.value_or(first);
}

double CutoffSchedule::sigma(int n) const {
  if (n < 0) throw DomainError("sigma: n >= 0 required");
  return params_.kappa * std::pow(params_.beta, n);
}

double CutoffSchedule::tau(int m) const {
  if (m < 0) throw DomainError("tau: m >= 0 required");
  return params_.kappa * std::pow(params_.gamma, m);
}

double CutoffSchedule::gap_decrement(int n) const {
  if (n < 1) throw DomainError("gap_decrement: n >= 1 required");
  double b = params_.beta;
  return (b - 1.0) * (b - 1.0) / (2.0 * b) * n / std::pow(b, n);
}

double CutoffSchedule::gap_bound_uv(int n) const {
  if (n < 0) throw DomainError("gap_bound_uv: n >= 0 required");
  if (n == 0) return params_.kappa / 2.0;  // induction base
  double sum = 0.0;
  for (int j = 1; j <= n; ++j) sum += gap_decrement(j);
  return params_.kappa / 8.0 * (1.0 - sum);
}

double CutoffSchedule::alpha() const {
  return -std::log(params_.gamma) / std::log(params_.beta);
}

double CutoffSchedule::alpha_bar() const { return alpha_bar_; }

int CutoffSchedule::alpha_min() const {
  double first = std::abs(6.0 * std::log(K_) - std::log(params_.gamma)) /
                 std::log(params_.beta);
  return static_cast<int>(std::ceil(std::max(first, alpha_bar_)));
}

Contour CutoffSchedule::contour_uv(int n, double e_prev) const {
  if (!std::isfinite(e_prev)) throw DomainError("contour_uv: non-finite center");
  double radius = 0.5 * gap_bound_uv(n);
  if (!(radius > 0.0)) throw DomainError("contour_uv: schedule exhausted");
  return Contour{Complex(e_prev, 0.0), radius, Complex(0.0, 0.0), n_quad_};
}

Contour CutoffSchedule::contour_ir(int m, double e_prev) const {
  if (!std::isfinite(e_prev)) throw DomainError("contour_ir: non-finite center");
  if (m < 1) throw DomainError("contour_ir: m >= 1 required");
  double radius = 0.5 * params_.zeta * tau(m);
  if (!(radius > 0.0)) throw DomainError("contour_ir: schedule exhausted");
  return Contour{Complex(e_prev, 0.0), radius, Complex(0.0, 0.0), n_quad_};
}

Contour CutoffSchedule::contour_ir_shifted(int m, double e_prev,
                                           Complex c_shift) const {
  Contour c = contour_ir(m, e_prev);
  c.shift = c_shift;
  return c;
}

double CutoffSchedule::vself_uv(int n) const {
  if (n == 0) return 0.0;
  return vself(sigma(n), params_.kappa, params_.g);
}

}  // namespace nelson
