#pragma once

#include <functional>

namespace adiabatic {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

// Globally adaptive 15-point Gauss-Kronrod quadrature on a finite interval,
// targeting an absolute error of `abs_tol`.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double abs_tol);

}  // namespace adiabatic
