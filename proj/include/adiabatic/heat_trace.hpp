#pragma once

#include <string>
#include <vector>

#include "adiabatic/heisenberg.hpp"
#include "adiabatic/spectrum.hpp"

namespace adiabatic {

struct HeatTraceResult {
  double t = 0.0;
  double h = 0.0;
  double value = 0.0;
  // Certified bound on the omitted part of the trace.
  double truncation_bound = 0.0;
  // Eigenvalue cutoff the summation stopped at.
  double cutoff = 0.0;
  std::vector<std::string> provenance;
};

/// Bound on sum_{lambda_i > cutoff} exp(-t lambda_i) from an envelope
/// N(lambda) <= C (1 + lambda)^d:
///
///     t C int_cutoff^inf (1 + lambda)^d e^{-t lambda} d lambda
///   = C d! t^{-d} e^{-t cutoff} sum_{j <= d} (t (1 + cutoff))^j / j!
double heat_tail_bound(const CountEnvelope& envelope, double t, double cutoff);

/// tr exp(-t Delta) by summation over a certified slice whose cutoff is
/// grown until the tail bound drops below `eps`.
HeatTraceResult heat_trace(const SpectrumSource& source, double t, double eps);

// eta / sinh(t eta) * exp(-t eta^2), extended by 1/t at eta = 0.
double limit_integrand(double eta, double t);

/// I(t) = int_R eta / sinh(t eta) exp(-t eta^2) d eta.
///
/// The integrand is even; [0, eta*] is split into `initial_panels` equal
/// panels. The result is computed at tolerances `tol` and `tol`/10, which
/// must agree within `tol`.
double limit_integral(double t, double tol, int initial_panels = 1);

// h^{-2} coefficient of the heat trace for an isometric flow:
// 1 / (4 sqrt(pi t^3)).
double riemannian_reference(double t);

// h^2 trace / coefficient.
double trace_ratio_from(double trace, double h, double coefficient);

struct TraceRatioResult {
  HeatTraceResult trace;
  double limit_integral = 0.0;
  double ratio = 0.0;
};

// 4 pi h^2 tr exp(-t Delta_h) / I(t) for the function Laplacian.
TraceRatioResult trace_ratio_detail(const HeisenbergAdiabaticModel& model,
                                    double t, double eps);
double trace_ratio(const HeisenbergAdiabaticModel& model, double t, double eps);

}  // namespace adiabatic
