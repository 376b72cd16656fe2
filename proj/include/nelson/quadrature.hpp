#pragma once

#include <functional>

#include "nelson/types.hpp"

namespace nelson {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
};

// Adaptive Simpson on a finite interval. abs_tol is the target for the
// whole interval; the recursion splits the budget.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double abs_tol,
                                    int max_depth = 60);

// Integral of f over [a, infinity). Substitutes r = a*e^u so integrands with
// power-law decay become exponentially damped; u is truncated where the
// supplied decay exponent p (f ~ r^-p at infinity, p > 1) bounds the tail
// below tail_tol.
QuadratureResult integrate_radial_tail(const std::function<double(double)>& f,
                                       double a, double decay_exponent,
                                       double abs_tol);

}  // namespace nelson
