#pragma once

#include <cstdint>
#include <string>

#include "adiabatic/spectrum.hpp"

namespace adiabatic {

/// Slope of the linear foliation dx + alpha dy direction on T^2.
///
/// Rationality is declared by the caller and never inferred from a float.
class SlopeParam {
 public:
  // p/q reduced to lowest terms with q > 0. Throws if q == 0.
  static SlopeParam Rational(std::int64_t p, std::int64_t q);
  static SlopeParam Irrational(double alpha);

  bool is_rational() const { return rational_; }
  std::int64_t p() const { return p_; }
  std::int64_t q() const { return q_; }
  double alpha() const { return alpha_; }
  std::string describe() const;

 private:
  SlopeParam() = default;

  bool rational_ = false;
  std::int64_t p_ = 0;
  std::int64_t q_ = 1;
  double alpha_ = 0.0;
};

struct TorusModel {
  TorusModel(SlopeParam slope, double h);

  SlopeParam slope;
  double h;
};

// (2 pi)^2 [ (k + alpha l)^2 + h^2 (-alpha k + l)^2 ] / (1 + alpha^2)
double torus_eigenvalue(const TorusModel& m, std::int64_t k, std::int64_t l);

// Radius R of the index disk k^2 + l^2 <= R^2 that contains every (k, l) with
// eigenvalue <= cutoff.
double torus_index_radius(const TorusModel& m, double cutoff);

/// Complete slice of the form Laplacian in degree 0, 1 or 2.
///
/// Degrees 0 and 2 share the function spectrum. Degree 1 consists of sums
/// lambda_{k1 l1} + lambda_{k2 l2} over ordered pairs of index pairs; every
/// ordered pair carries multiplicity 2.
SpectrumSlice torus_spectrum(const TorusModel& m, int degree, double cutoff);

/// Number of eigenvalues <= lambda (Closed) or < lambda (Open) without
/// materializing a slice. `threads` > 1 splits the l-range across workers.
std::int64_t torus_count_exact(const TorusModel& m, double lambda, int degree,
                               CountMode mode, unsigned threads = 1);

/// Leading h^{-1} asymptotics of the eigenvalue counting function:
/// lambda / (4 pi h) for irrational slopes and the finite lattice sum over
/// leafwise levels for rational p/q.
double torus_predicted_count(const SlopeParam& slope, double lambda, double h);

/// Spectrum distribution function of the leafwise Laplacian.
///
/// Irrational: sqrt(lambda)/pi. Rational p/q: jumps of size 1/sqrt(p^2+q^2)
/// at 0 and 2/sqrt(p^2+q^2) at 4 pi^2 k^2 / (p^2+q^2), k >= 1.
LeafwiseSdf torus_leafwise_sdf(const SlopeParam& slope);

class TorusSource final : public SpectrumSource {
 public:
  TorusSource(TorusModel model, int degree);

  SpectrumSlice slice(double cutoff) const override;
  CountEnvelope envelope() const override { return envelope_; }
  double h() const override { return model_.h; }

 private:
  TorusModel model_;
  int degree_;
  CountEnvelope envelope_;
};

}  // namespace adiabatic
