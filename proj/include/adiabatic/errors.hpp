#pragma once

#include <stdexcept>
#include <string>

namespace adiabatic {

// An input violates the documented precondition of an operation.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical result cannot be classified or certified unambiguously.
class AmbiguityError : public std::runtime_error {
 public:
  AmbiguityError(const std::string& what, double fitted_slope)
      : std::runtime_error(what), fitted_slope_(fitted_slope) {}

  double fitted_slope() const { return fitted_slope_; }

 private:
  double fitted_slope_;
};

}  // namespace adiabatic
