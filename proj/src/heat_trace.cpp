#include "adiabatic/heat_trace.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "adiabatic/errors.hpp"
#include "adiabatic/quadrature.hpp"

namespace adiabatic {
namespace {

constexpr double kPi = std::numbers::pi;

// Neumaier-compensated running sum. Terms are added in slice order, so the
// result is bit-stable for a given slice.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

double gaussian_tail_cut(double t, double tol) {
  // Integrand <= e^{-t eta^2}/t, and 2 int_x^inf e^{-t eta^2}/t <=
  // e^{-t x^2} / (t^2 x).
  double x = 1.0 / std::sqrt(t);
  while (std::exp(-t * x * x) / (t * t * x) > tol) x *= 1.25;
  return x;
}

double integrate_limit(double t, double tol, int panels) {
  const double cut = gaussian_tail_cut(t, tol / 10.0);
  const double width = cut / panels;
  const double panel_tol = tol / (4.0 * panels);
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    total += integrate_adaptive([t](double eta) { return limit_integrand(eta, t); },
                                i * width, (i + 1) * width, panel_tol)
                 .value;
  }
  return 2.0 * total;
}

}  // namespace

double heat_tail_bound(const CountEnvelope& envelope, double t,
                       double cutoff) {
  const double shifted = t * (1.0 + cutoff);
  double term = 1.0;
  double series = 1.0;
  double factorial = 1.0;
  for (int j = 1; j <= envelope.degree; ++j) {
    term *= shifted / j;
    series += term;
    factorial *= j;
  }
  return envelope.constant * factorial * std::pow(t, -envelope.degree) *
         std::exp(-t * cutoff) * series;
}

HeatTraceResult heat_trace(const SpectrumSource& source, double t,
                           double eps) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw PreconditionError("heat_trace requires t > 0");
  }
  if (!(eps > 0.0)) throw PreconditionError("heat_trace requires eps > 0");

  const CountEnvelope envelope = source.envelope();
  double hi = std::max(1.0, 1.0 / t);
  while (heat_tail_bound(envelope, t, hi) > eps) hi *= 2.0;
  // Shrink towards the smallest admissible cutoff to limit enumeration work.
  double lo = hi / 2.0;
  for (int i = 0; i < 30 && hi - lo > 1e-3 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (heat_tail_bound(envelope, t, mid) > eps) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  const SpectrumSlice slice = source.slice(hi);
  CompensatedSum sum;
  for (const auto& e : slice.entries()) {
    sum.add(static_cast<double>(e.multiplicity) * std::exp(-t * e.value));
  }
  HeatTraceResult result;
  result.t = t;
  result.h = source.h();
  result.value = sum.value();
  result.truncation_bound = heat_tail_bound(envelope, t, hi);
  result.cutoff = hi;
  result.provenance = slice.provenance();
  std::ostringstream tail;
  tail << "tail: N(lambda) <= " << format_number(envelope.constant)
       << " (1+lambda)^" << envelope.degree << " beyond cutoff "
       << format_number(hi);
  result.provenance.push_back(tail.str());
  return result;
}

double limit_integrand(double eta, double t) {
  const double a = std::abs(eta);
  if (a == 0.0) return 1.0 / t;
  const double x = t * a;
  if (x < 20.0) return a / std::sinh(x) * std::exp(-t * a * a);
  // a / sinh(x) = 2 a e^{-x} / (1 - e^{-2x}), evaluated in log space.
  return std::exp(std::log(2.0 * a) - x - t * a * a) / -std::expm1(-2.0 * x);
}

double limit_integral(double t, double tol, int initial_panels) {
  if (!(t > 0.0)) throw PreconditionError("limit_integral requires t > 0");
  if (!(tol > 0.0)) throw PreconditionError("limit_integral requires tol > 0");
  if (initial_panels < 1) {
    throw PreconditionError("limit_integral requires at least one panel");
  }
  const double coarse = integrate_limit(t, tol, initial_panels);
  const double fine = integrate_limit(t, tol / 10.0, initial_panels);
  if (std::abs(coarse - fine) > tol) {
    throw std::runtime_error("limit_integral: tolerance self-check failed");
  }
  return fine;
}

double riemannian_reference(double t) {
  if (!(t > 0.0)) throw PreconditionError("riemannian_reference requires t > 0");
  return 1.0 / (4.0 * std::sqrt(kPi * t * t * t));
}

double trace_ratio_from(double trace, double h, double coefficient) {
  return h * h * trace / coefficient;
}

TraceRatioResult trace_ratio_detail(const HeisenbergAdiabaticModel& model,
                                    double t, double eps) {
  TraceRatioResult r;
  r.trace = heat_trace(HeisenbergSource(model, 0), t, eps);
  r.limit_integral = limit_integral(t, 1e-12);
  r.ratio = trace_ratio_from(r.trace.value, model.h,
                             r.limit_integral / (4.0 * kPi));
  return r;
}

double trace_ratio(const HeisenbergAdiabaticModel& model, double t,
                   double eps) {
  return trace_ratio_detail(model, t, eps).ratio;
}

}  // namespace adiabatic
