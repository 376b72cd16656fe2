#include "nelson/quadrature.hpp"

#include <cmath>

namespace nelson {

namespace {

struct SimpsonState {
  const std::function<double(double)>* f;
  int evals = 0;
};

double simpson(SimpsonState& st, double a, double fa, double b, double fb,
               double fm, double whole, double tol, int depth, double& err) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = (*st.f)(lm), frm = (*st.f)(rm);
  st.evals += 2;
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    err += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  double e1 = 0.0, e2 = 0.0;
  double v1 = simpson(st, a, fa, m, fm, flm, left, tol / 2, depth - 1, e1);
  double v2 = simpson(st, m, fm, b, fb, frm, right, tol / 2, depth - 1, e2);
  err += e1 + e2;
  return v1 + v2;
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double abs_tol,
                                    int max_depth) {
  QuadratureResult r;
  if (!(b > a)) return r;
  SimpsonState st{&f, 0};
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  st.evals = 3;
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double err = 0.0;
  r.value = simpson(st, a, fa, b, fb, fm, whole, abs_tol, max_depth, err);
  r.error_estimate = err;
  r.evaluations = st.evals;
  return r;
}

QuadratureResult integrate_radial_tail(const std::function<double(double)>& f,
                                       double a, double decay_exponent,
                                       double abs_tol) {
  if (!(a > 0.0)) throw DomainError("integrate_radial_tail: lower bound must be positive");
  if (!(decay_exponent > 1.0))
    throw DomainError("integrate_radial_tail: integrand must decay faster than 1/r");
  // After r = a*e^u the integrand carries e^{-(p-1)u}; truncate where the
  // geometric tail drops below tail_tol relative to the u=0 magnitude.
  double f0 = std::abs(f(a)) * a;
  double scale = std::max(f0, 1e-300);
  double rate = decay_exponent - 1.0;
  double u_max = std::max(1.0, std::log(scale / (abs_tol * rate * 0.1) + 1.0) / rate);
  auto g = [&](double u) {
    double r = a * std::exp(u);
    return f(r) * r;  // dr = r du
  };
  QuadratureResult res = integrate_adaptive(g, 0.0, u_max, abs_tol * 0.5);
  // Analytic bound on the discarded tail, from |f(r)| <= M r^-p with M read
  // off at the truncation point.
  double r_end = a * std::exp(u_max);
  double m_end = std::abs(f(r_end)) * std::pow(r_end, decay_exponent);
  double tail = m_end * std::pow(r_end, 1.0 - decay_exponent) / rate;
  res.error_estimate += tail;
  return res;
}

}  // namespace nelson
