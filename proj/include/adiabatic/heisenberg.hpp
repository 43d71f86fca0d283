#pragma once

#include <cstdint>
#include <string>

#include "adiabatic/spectrum.hpp"

namespace adiabatic {

/// Left-invariant metric on the Heisenberg nilmanifold in normal form
///
///     [ h11 h12  0  ]
///     [ h12 h22  0  ]
///     [  0   0  g33 ]
class HeisenbergMetric {
 public:
  // Throws PreconditionError unless h11 > 0, g33 > 0 and h11 h22 - h12^2 > 0.
  HeisenbergMetric(double h11, double h12, double h22, double g33);

  double h11() const { return h11_; }
  double h12() const { return h12_; }
  double h22() const { return h22_; }
  double g33() const { return g33_; }
  double det2() const { return h11_ * h22_ - h12_ * h12_; }
  bool diagonal() const { return h12_ == 0.0; }

 private:
  double h11_;
  double h12_;
  double h22_;
  double g33_;
};

/// Adiabatic family g_h for the flow along X(1, alpha, 0) with the identity
/// reference metric.
struct HeisenbergAdiabaticModel {
  HeisenbergAdiabaticModel(double h, double alpha);

  double h;
  double alpha;
  // One-form spectra are only available for the diagonal case alpha == 0.
  bool diagonal() const { return alpha == 0.0; }
};

// Function spectrum, lattice family: 4 pi^2 (h22 a^2 - 2 h12 a b + h11 b^2)/det2.
double heis_lattice_eigenvalue(const HeisenbergMetric& g, std::int64_t a,
                               std::int64_t b);
// Landau-level family: 4 pi^2 c^2/g33 + 2 pi c (2k+1)/sqrt(det2), mult 2c.
double heis_landau_eigenvalue(const HeisenbergMetric& g, std::int64_t c,
                              std::int64_t k);

enum class Branch { Minus, Plus };

// One-form lattice family lambda_{+-}(a, b) (diagonal metric), mult 2 each.
double heis_oneform_lattice_eigenvalue(const HeisenbergMetric& g,
                                       std::int64_t a, std::int64_t b,
                                       Branch branch);
// One-form mixed family mu_{+-}(c, k) (diagonal metric), mult 2c each.
double heis_oneform_mixed_eigenvalue(const HeisenbergMetric& g, std::int64_t c,
                                     std::int64_t k, Branch branch);

// Certified index ranges; every eigenvalue <= cutoff has indices inside.
struct LatticeBounds {
  double radius = 0.0;      // a^2 + b^2 <= radius^2
};
struct LandauBounds {
  std::int64_t c_max = 0;   // 1 <= c <= c_max
  std::int64_t k_max = 0;   // 0 <= k <= k_max for every c
};

LatticeBounds heis_lattice_bounds(const HeisenbergMetric& g, double cutoff);
LandauBounds heis_landau_bounds(const HeisenbergMetric& g, double cutoff);
LatticeBounds heis_oneform_lattice_bounds(const HeisenbergMetric& g,
                                          double cutoff);
LandauBounds heis_oneform_mixed_bounds(const HeisenbergMetric& g,
                                       double cutoff);

SpectrumSlice heis_function_spectrum(const HeisenbergMetric& g, double cutoff);

// Throws PreconditionError when h12 != 0.
SpectrumSlice heis_oneform_spectrum(const HeisenbergMetric& g, double cutoff);

HeisenbergMetric heis_adiabatic_metric(const HeisenbergAdiabaticModel& m);

/// Degrees 0 and 3 give the function spectrum, 1 and 2 the one-form
/// spectrum (diagonal models only).
SpectrumSlice heis_form_spectrum(const HeisenbergAdiabaticModel& m, int degree,
                                 double cutoff);

CountEnvelope heis_function_envelope(const HeisenbergMetric& g);
CountEnvelope heis_oneform_envelope(const HeisenbergMetric& g);

class HeisenbergSource final : public SpectrumSource {
 public:
  HeisenbergSource(HeisenbergAdiabaticModel model, int degree);

  SpectrumSlice slice(double cutoff) const override;
  CountEnvelope envelope() const override { return envelope_; }
  double h() const override { return model_.h; }

 private:
  HeisenbergAdiabaticModel model_;
  int degree_;
  CountEnvelope envelope_;
};

}  // namespace adiabatic
