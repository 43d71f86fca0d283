#include "adiabatic/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace adiabatic {

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double abs_tol) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
  constexpr unsigned kMaxDepth = 20;
  // Error estimates stall near roundoff; asking for less makes every branch
  // recurse to the depth limit.
  constexpr double kRelFloor = 1e-14;
  if (a == b) return {};
  // Boost terminates on error <= tol * L1; convert the absolute target using
  // a coarse L1 estimate.
  double l1 = 0.0;
  Rule::integrate(f, a, b, 0, 0.0, nullptr, &l1);
  const double rel_tol =
      l1 > 0.0 ? std::max(abs_tol / l1, kRelFloor) : kRelFloor;
  double error = 0.0;
  const double value = Rule::integrate(f, a, b, kMaxDepth, rel_tol, &error);
  return {value, error};
}

}  // namespace adiabatic
