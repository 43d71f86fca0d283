#include "adiabatic/heisenberg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "adiabatic/detail/row_walk.hpp"
#include "adiabatic/errors.hpp"

namespace adiabatic {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourPiSq = 4.0 * kPi * kPi;

double as_double(std::int64_t n) { return static_cast<double>(n); }

// (h11 h22)^{1/2}, G = g33/(h11 h22) and S = 4 pi^2 (a^2/h11 + b^2/h22) of
// the one-form formulas.
struct OneFormTerms {
  double root_det;
  double twist;  // G
};

OneFormTerms oneform_terms(const HeisenbergMetric& g) {
  const double det = g.h11() * g.h22();
  return {std::sqrt(det), g.g33() / det};
}

double lattice_energy(const HeisenbergMetric& g, std::int64_t a,
                      std::int64_t b) {
  const double ad = as_double(a);
  const double bd = as_double(b);
  return kFourPiSq * (ad * ad / g.h11() + bd * bd / g.h22());
}

void require_diagonal(const HeisenbergMetric& g) {
  if (!g.diagonal()) {
    throw PreconditionError(
        "one-form formula requires diagonal metric (h12 == 0)");
  }
}

void require_cutoff(double cutoff) {
  if (!(cutoff > 0.0) || !std::isfinite(cutoff)) {
    throw PreconditionError("spectrum cutoff must be positive and finite");
  }
}

// Largest root of x - sqrt(G x) = bound in the variable sqrt(x), squared.
// Every x >= 0 with x - sqrt(G x) <= bound satisfies x <= result.
double sqrt_shifted_bound(double twist, double bound) {
  const double disc = twist + 4.0 * bound;
  if (disc < 0.0) return -1.0;
  const double root = 0.5 * (std::sqrt(twist) + std::sqrt(disc));
  return root * root;
}

std::int64_t landau_k_bound(double root_det2, double cutoff, std::int64_t c) {
  // 2 pi c (2k + 1) / sqrt(det2) <= cutoff.
  const double odd = cutoff * root_det2 / (2.0 * kPi * as_double(c));
  return detail::index_bound(std::max(0.0, 0.5 * (odd - 1.0)));
}

void append_landau(const HeisenbergMetric& g, double cutoff,
                   std::vector<EigenvalueEntry>& raw) {
  const auto bounds = heis_landau_bounds(g, cutoff);
  const double root_det2 = std::sqrt(g.det2());
  for (std::int64_t c = 1; c <= bounds.c_max; ++c) {
    const std::int64_t kmax = landau_k_bound(root_det2, cutoff, c);
    for (std::int64_t k = 0; k <= kmax; ++k) {
      const double v = heis_landau_eigenvalue(g, c, k);
      if (v > cutoff) break;
      raw.push_back({v, 2 * c});
    }
  }
}

std::string landau_provenance(const HeisenbergMetric& g, double cutoff) {
  const auto b = heis_landau_bounds(g, cutoff);
  std::ostringstream out;
  out << "landau family: 4pi^2 c^2/g33 <= cutoff gives c <= "
      << b.c_max << "; 2pi c(2k+1)/sqrt(det2) <= cutoff gives k <= "
      << b.k_max << " at c=1";
  return out.str();
}

double mixed_k_bound(const HeisenbergMetric& g, double cutoff,
                     std::int64_t c) {
  const auto [root_det, twist] = oneform_terms(g);
  const double beta = 2.0 * kPi / root_det;
  const double cd = as_double(c);
  const double landau = kFourPiSq * cd * cd / g.g33();
  const double x_max = sqrt_shifted_bound(twist, cutoff - landau);
  if (x_max < 0.0) return -1.0;
  return x_max / (2.0 * beta * cd);
}

}  // namespace

HeisenbergMetric::HeisenbergMetric(double h11, double h12, double h22,
                                   double g33)
    : h11_(h11), h12_(h12), h22_(h22), g33_(g33) {
  if (!std::isfinite(h11) || !std::isfinite(h12) || !std::isfinite(h22) ||
      !std::isfinite(g33)) {
    throw PreconditionError("Heisenberg metric entries must be finite");
  }
  if (!(h11 > 0.0)) throw PreconditionError("Heisenberg metric requires h11 > 0");
  if (!(g33 > 0.0)) throw PreconditionError("Heisenberg metric requires g33 > 0");
  if (!(det2() > 0.0)) {
    throw PreconditionError(
        "Heisenberg metric requires h11 h22 - h12^2 > 0");
  }
}

HeisenbergAdiabaticModel::HeisenbergAdiabaticModel(double h_in,
                                                   double alpha_in)
    : h(h_in), alpha(alpha_in) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw PreconditionError("Heisenberg adiabatic model requires h > 0");
  }
  if (!std::isfinite(alpha)) {
    throw PreconditionError("Heisenberg adiabatic model requires finite alpha");
  }
}

double heis_lattice_eigenvalue(const HeisenbergMetric& g, std::int64_t a,
                               std::int64_t b) {
  const double ad = as_double(a);
  const double bd = as_double(b);
  return kFourPiSq *
         (g.h22() * ad * ad - 2.0 * g.h12() * ad * bd + g.h11() * bd * bd) /
         g.det2();
}

double heis_landau_eigenvalue(const HeisenbergMetric& g, std::int64_t c,
                              std::int64_t k) {
  const double cd = as_double(c);
  return kFourPiSq * cd * cd / g.g33() +
         2.0 * kPi * cd * as_double(2 * k + 1) / std::sqrt(g.det2());
}

double heis_oneform_lattice_eigenvalue(const HeisenbergMetric& g,
                                       std::int64_t a, std::int64_t b,
                                       Branch branch) {
  require_diagonal(g);
  const double twist = oneform_terms(g).twist;
  const double s = lattice_energy(g, a, b);
  const double radical = std::sqrt(twist * twist + 4.0 * twist * s);
  if (branch == Branch::Plus) return s + 0.5 * (twist + radical);
  // s + (G - R)/2 rewritten without cancellation.
  const double denom = twist + radical;
  return 4.0 * twist * s * s / (denom * denom);
}

double heis_oneform_mixed_eigenvalue(const HeisenbergMetric& g, std::int64_t c,
                                     std::int64_t k, Branch branch) {
  require_diagonal(g);
  const auto [root_det, twist] = oneform_terms(g);
  const double cd = as_double(c);
  const double kd = as_double(k);
  const double beta = 2.0 * kPi / root_det;
  const double landau = kFourPiSq * cd * cd / g.g33();
  const double base = landau + beta * cd * (2.0 * kd + 1.0);  // A
  const double shift = 2.0 * beta * cd;                        // 4 pi c/sqrt
  const double cross = 8.0 * kd * cd * beta * twist;           // 8k 2pi c g33/..^3
  const double radical =
      std::sqrt((shift + twist) * (shift + twist) + cross);
  if (branch == Branch::Plus) return base + 0.5 * (twist + radical);
  // ((2A + G)^2 - R^2) / (2 (2A + G + R)); the O(k) terms cancel exactly.
  const double numer = 2.0 * landau * (2.0 * base + shift + 2.0 * twist) +
                       4.0 * kd * beta * cd * (2.0 * base + shift);
  return numer / (2.0 * (2.0 * base + twist + radical));
}

LatticeBounds heis_lattice_bounds(const HeisenbergMetric& g, double cutoff) {
  // lambda(a,b) >= 4 pi^2 sigma_min (a^2 + b^2) / det2 where sigma_min is the
  // smaller eigenvalue of [[h22, -h12], [-h12, h11]].
  const double half_trace = 0.5 * (g.h11() + g.h22());
  const double spread =
      std::hypot(0.5 * (g.h22() - g.h11()), g.h12());
  const double sigma_max = half_trace + spread;
  const double sigma_min = g.det2() / sigma_max * (1.0 - 1e-9);
  const double reach = std::max(cutoff, 0.0) * g.det2() / kFourPiSq;
  return {std::sqrt(reach / sigma_min)};
}

LandauBounds heis_landau_bounds(const HeisenbergMetric& g, double cutoff) {
  if (!(cutoff > 0.0)) return {0, -1};
  const double c_real = std::sqrt(cutoff * g.g33()) / (2.0 * kPi);
  return {detail::index_bound(c_real),
          landau_k_bound(std::sqrt(g.det2()), cutoff, 1)};
}

LatticeBounds heis_oneform_lattice_bounds(const HeisenbergMetric& g,
                                          double cutoff) {
  require_diagonal(g);
  // sqrt(G^2 + 4GS) <= G + 2 sqrt(GS) gives lambda_- >= S - sqrt(GS), so
  // lambda_- <= cutoff forces S <= s_max.
  const double twist = oneform_terms(g).twist;
  const double s_max = sqrt_shifted_bound(twist, std::max(cutoff, 0.0));
  const double widest = std::max(g.h11(), g.h22());
  return {std::sqrt(s_max * widest / kFourPiSq)};
}

LandauBounds heis_oneform_mixed_bounds(const HeisenbergMetric& g,
                                       double cutoff) {
  require_diagonal(g);
  // sqrt(x^2 + y) <= x + sqrt(y) gives, with x = 2k beta c,
  // mu_- >= 4pi^2 c^2/g33 + x - sqrt(G x) >= 4pi^2 c^2/g33 - G/4.
  const double twist = oneform_terms(g).twist;
  const double reach = cutoff + 0.25 * twist;
  if (!(reach > 0.0)) return {0, -1};
  const double c_real = std::sqrt(reach * g.g33()) / (2.0 * kPi);
  const double k_real = mixed_k_bound(g, cutoff, 1);
  return {detail::index_bound(c_real),
          k_real < 0.0 ? -1 : detail::index_bound(k_real)};
}

SpectrumSlice heis_function_spectrum(const HeisenbergMetric& g, double cutoff) {
  require_cutoff(cutoff);
  std::vector<EigenvalueEntry> lattice;
  const double radius = heis_lattice_bounds(g, cutoff).radius;
  const std::int64_t amax = detail::index_bound(radius);
  const double reach = cutoff * g.det2() / kFourPiSq;
  for (std::int64_t a = -amax; a <= amax; ++a) {
    const double ad = as_double(a);
    double vertex = 0.0;
    double half_width = 0.0;
    // h11 b^2 - 2 h12 a b + h22 a^2 <= cutoff det2 / (4 pi^2)
    detail::quadratic_interval(g.h11(), -2.0 * g.h12() * ad,
                               g.h22() * ad * ad - reach, vertex, half_width);
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    const bool any = detail::settle_row(
        vertex, half_width,
        [&](std::int64_t b) {
          return heis_lattice_eigenvalue(g, a, b) <= cutoff;
        },
        lo, hi);
    if (!any) continue;
    for (std::int64_t b = lo; b <= hi; ++b) {
      lattice.push_back({heis_lattice_eigenvalue(g, a, b), 1});
    }
  }
  std::ostringstream prov;
  prov << "lattice family: lambda(a,b) >= 4pi^2 sigma_min (a^2+b^2)/det2 "
          "gives a^2+b^2 <= "
       << format_number(radius * radius)
       << "; rows |a| <= floor(R)+1, b from the per-row quadratic";
  auto sigma1 = SpectrumSlice::FromEntries(cutoff, std::move(lattice), true,
                                           prov.str());

  std::vector<EigenvalueEntry> landau;
  append_landau(g, cutoff, landau);
  auto sigma2 = SpectrumSlice::FromEntries(cutoff, std::move(landau), true,
                                           landau_provenance(g, cutoff));
  return merge(sigma1, sigma2);
}

SpectrumSlice heis_oneform_spectrum(const HeisenbergMetric& g, double cutoff) {
  require_diagonal(g);
  require_cutoff(cutoff);
  const double twist = oneform_terms(g).twist;

  std::vector<EigenvalueEntry> lattice;
  const double s_max = sqrt_shifted_bound(twist, cutoff);
  const std::int64_t amax = detail::index_bound(
      std::sqrt(s_max * g.h11() / kFourPiSq));
  for (std::int64_t a = -amax; a <= amax; ++a) {
    const double ad = as_double(a);
    double vertex = 0.0;
    double half_width = 0.0;
    // S(a, b) <= s_max as a quadratic in b.
    detail::quadratic_interval(kFourPiSq / g.h22(), 0.0,
                               kFourPiSq * ad * ad / g.h11() - s_max, vertex,
                               half_width);
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    // lambda_- is nondecreasing in S, so admissible b form an interval.
    const bool any = detail::settle_row(
        vertex, half_width,
        [&](std::int64_t b) {
          return heis_oneform_lattice_eigenvalue(g, a, b, Branch::Minus) <=
                 cutoff;
        },
        lo, hi);
    if (!any) continue;
    for (std::int64_t b = lo; b <= hi; ++b) {
      lattice.push_back(
          {heis_oneform_lattice_eigenvalue(g, a, b, Branch::Minus), 2});
      const double plus = heis_oneform_lattice_eigenvalue(g, a, b, Branch::Plus);
      if (plus <= cutoff) lattice.push_back({plus, 2});
    }
  }
  std::ostringstream prov1;
  prov1 << "one-form lattice family: sqrt(G^2+4GS) <= G+2sqrt(GS) gives "
           "lambda_- >= S-sqrt(GS), hence S <= "
        << format_number(s_max) << " and a^2+b^2 <= "
        << format_number(std::pow(heis_oneform_lattice_bounds(g, cutoff).radius, 2));
  auto sigma1 = SpectrumSlice::FromEntries(cutoff, std::move(lattice), true,
                                           prov1.str());

  std::vector<EigenvalueEntry> landau;
  append_landau(g, cutoff, landau);
  auto sigma2 = SpectrumSlice::FromEntries(cutoff, std::move(landau), true,
                                           landau_provenance(g, cutoff));

  std::vector<EigenvalueEntry> mixed;
  const auto mixed_bounds = heis_oneform_mixed_bounds(g, cutoff);
  for (std::int64_t c = 1; c <= mixed_bounds.c_max; ++c) {
    const double k_real = mixed_k_bound(g, cutoff, c);
    if (k_real < 0.0) continue;
    const std::int64_t kmax = detail::index_bound(k_real);
    for (std::int64_t k = 0; k <= kmax; ++k) {
      const double minus =
          heis_oneform_mixed_eigenvalue(g, c, k, Branch::Minus);
      if (minus <= cutoff) mixed.push_back({minus, 2 * c});
      const double plus = heis_oneform_mixed_eigenvalue(g, c, k, Branch::Plus);
      if (plus <= cutoff) mixed.push_back({plus, 2 * c});
    }
  }
  std::ostringstream prov3;
  prov3 << "one-form mixed family: sqrt(x^2+y) <= x+sqrt(y) gives "
           "mu_- >= 4pi^2c^2/g33 + x - sqrt(Gx), x=2k*2pi*c/sqrt(h11h22) >= 0; "
           "hence c <= "
        << mixed_bounds.c_max << " and k <= " << mixed_bounds.k_max
        << " at c=1";
  auto sigma3 = SpectrumSlice::FromEntries(cutoff, std::move(mixed), true,
                                           prov3.str());
  return merge(merge(sigma1, sigma2), sigma3);
}

HeisenbergMetric heis_adiabatic_metric(const HeisenbergAdiabaticModel& m) {
  const double inv_h2 = 1.0 / (m.h * m.h);
  const double a2 = m.alpha * m.alpha;
  const double norm = 1.0 + a2;
  return HeisenbergMetric((1.0 + inv_h2 * a2) / norm,
                          m.alpha * (1.0 - inv_h2) / norm,
                          (a2 + inv_h2) / norm, inv_h2);
}

SpectrumSlice heis_form_spectrum(const HeisenbergAdiabaticModel& m, int degree,
                                 double cutoff) {
  switch (degree) {
    case 0:
    case 3:
      return heis_function_spectrum(heis_adiabatic_metric(m), cutoff);
    case 1:
    case 2:
      if (!m.diagonal()) {
        throw PreconditionError(
            "one- and two-form spectra are only available for alpha == 0");
      }
      return heis_oneform_spectrum(heis_adiabatic_metric(m), cutoff);
    default:
      throw PreconditionError("Heisenberg form degree must be 0, 1, 2 or 3");
  }
}

// The bounds below use lambda^e <= (1 + lambda)^2 for 0 <= e <= 2 and the
// disk count #{x in Z^2 : |x| <= R} <= pi (R + 1/sqrt 2)^2 <= 2 pi R^2 + pi.
CountEnvelope heis_function_envelope(const HeisenbergMetric& g) {
  const double r1 = heis_lattice_bounds(g, 1.0).radius;  // R^2 is linear
  const double lattice = 2.0 * kPi * r1 * r1 + kPi;
  // sum_{c <= c_max} 2c (lambda sqrt(det2)/(4 pi c) + 1/2) with
  // c_max = sqrt(lambda g33)/(2 pi).
  const double root = std::sqrt(g.g33() * g.det2());
  const double landau = root / kFourPiSq + g.g33() / (2.0 * kFourPiSq) +
                        std::sqrt(g.g33()) / (4.0 * kPi);
  return {4.0 * (lattice + landau), 2};
}

CountEnvelope heis_oneform_envelope(const HeisenbergMetric& g) {
  require_diagonal(g);
  const auto [root_det, twist] = oneform_terms(g);
  const double widest = std::max(g.h11(), g.h22());
  // Four entries per (a, b); S <= G + 2 lambda.
  const double lattice =
      4.0 * (2.0 * kPi * (twist + 2.0) * widest / kFourPiSq + kPi);
  const HeisenbergMetric diag(g.h11(), 0.0, g.h22(), g.g33());
  const double root = std::sqrt(g.g33() * diag.det2());
  const double landau = root / kFourPiSq + g.g33() / (2.0 * kFourPiSq) +
                        std::sqrt(g.g33()) / (4.0 * kPi);
  // c <= kappa (sqrt lambda + gamma), kappa = sqrt(g33)/(2 pi),
  // gamma = sqrt(G)/2; per c at most (G + 2 lambda)/(2 beta c) + 1 values of
  // k, two branches of multiplicity 2c each.
  const double beta = 2.0 * kPi / root_det;
  const double kappa = std::sqrt(g.g33()) / (2.0 * kPi);
  const double gamma = 0.5 * std::sqrt(twist);
  const double mixed = kappa / beta * (2.0 * twist + 4.0 + 2.0 * twist * gamma +
                                       4.0 * gamma) +
                       4.0 * kappa * kappa * (1.0 + gamma * gamma) +
                       2.0 * kappa * (1.0 + gamma);
  return {4.0 * (lattice + landau + mixed), 2};
}

HeisenbergSource::HeisenbergSource(HeisenbergAdiabaticModel model, int degree)
    : model_(model), degree_(degree) {
  if (degree < 0 || degree > 3) {
    throw PreconditionError("Heisenberg form degree must be 0, 1, 2 or 3");
  }
  const HeisenbergMetric g = heis_adiabatic_metric(model_);
  if (degree == 1 || degree == 2) {
    if (!model_.diagonal()) {
      throw PreconditionError(
          "one- and two-form spectra are only available for alpha == 0");
    }
    envelope_ = heis_oneform_envelope(g);
  } else {
    envelope_ = heis_function_envelope(g);
  }
}

SpectrumSlice HeisenbergSource::slice(double cutoff) const {
  return heis_form_spectrum(model_, degree_, cutoff);
}

}  // namespace adiabatic
