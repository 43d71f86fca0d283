#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace adiabatic {

struct EigenvalueEntry {
  double value = 0.0;
  std::int64_t multiplicity = 1;

  friend bool operator==(const EigenvalueEntry&, const EigenvalueEntry&) = default;
};

// Closed counts eigenvalues <= lambda, Open counts eigenvalues < lambda.
enum class CountMode { Closed, Open };

// Relative distance below which values coming from different formula
// families are reported as a near collision (they are never merged).
inline constexpr double kNearCollisionTolerance = 1e-12;

/// Sorted, multiplicity-tagged eigenvalues of one operator below a cutoff.
///
/// Entries are strictly increasing; equal values are merged by summing
/// multiplicities. `complete()` certifies that no eigenvalue <= cutoff is
/// missing; `provenance()` records the index bounds used for that claim.
class SpectrumSlice {
 public:
  SpectrumSlice() = default;

  /// Builds a slice from unsorted raw entries produced by a single formula
  /// family. Entries above `cutoff` are dropped, bit-identical values merged.
  static SpectrumSlice FromEntries(double cutoff,
                                   std::vector<EigenvalueEntry> raw,
                                   bool complete, std::string provenance);

  double cutoff() const { return cutoff_; }
  std::span<const EigenvalueEntry> entries() const { return entries_; }
  bool complete() const { return complete_; }
  const std::vector<std::string>& provenance() const { return provenance_; }
  bool near_collision() const { return near_collision_; }
  bool empty() const { return entries_.empty(); }
  std::int64_t total_multiplicity() const;

  // Eigenvalues repeated according to multiplicity, ascending, at most
  // `limit` of them.
  std::vector<double> expanded(std::size_t limit) const;

  friend SpectrumSlice merge(const SpectrumSlice& a, const SpectrumSlice& b);

 private:
  double cutoff_ = 0.0;
  std::vector<EigenvalueEntry> entries_;
  bool complete_ = false;
  std::vector<std::string> provenance_;
  bool near_collision_ = false;
};

/// Multiset union of two slices with the same cutoff.
SpectrumSlice merge(const SpectrumSlice& a, const SpectrumSlice& b);

/// Number of eigenvalues (with multiplicity) <= lambda or < lambda.
/// Throws PreconditionError when lambda exceeds the cutoff or the slice is
/// not certified complete.
std::int64_t count_below(const SpectrumSlice& s, double lambda, CountMode mode);

struct Jump {
  double location = 0.0;
  double size = 0.0;
};

/// Right-continuous pure-point distribution function.
class StepFunction {
 public:
  StepFunction() = default;
  explicit StepFunction(std::vector<Jump> jumps);

  std::span<const Jump> jumps() const { return jumps_; }
  double operator()(double tau) const;

 private:
  std::vector<Jump> jumps_;
};

/// Sum over jumps at tau_j <= lambda of size_j * (lambda - tau_j)^exponent.
double stieltjes_moment(const StepFunction& f, double lambda, double exponent);

// Absolutely continuous distribution function given with its density.
struct ContinuousSdf {
  std::function<double(double)> value;
  std::function<double(double)> density;
};

// Produces the jumps of a step distribution with location <= bound.
using StepFunctionGenerator = std::function<StepFunction(double bound)>;

using LeafwiseSdf = std::variant<ContinuousSdf, StepFunctionGenerator>;

// Upper bound N(lambda) <= constant * (1 + lambda)^degree for all lambda >= 0.
struct CountEnvelope {
  double constant = 0.0;
  int degree = 0;

  double operator()(double lambda) const;
};

// Combined envelope of a union of spectra.
CountEnvelope operator+(const CountEnvelope& a, const CountEnvelope& b);

/// A family of operators whose spectrum can be enumerated to any cutoff with
/// a completeness certificate.
class SpectrumSource {
 public:
  virtual ~SpectrumSource() = default;

  virtual SpectrumSlice slice(double cutoff) const = 0;
  // Proven upper bound on the counting function.
  virtual CountEnvelope envelope() const = 0;
  // Adiabatic parameter of the modeled operator (NaN when not applicable).
  virtual double h() const = 0;
};

// A finite, fully known spectrum.
class FixedSpectrumSource final : public SpectrumSource {
 public:
  explicit FixedSpectrumSource(std::vector<EigenvalueEntry> entries,
                               double h = 1.0);

  SpectrumSlice slice(double cutoff) const override;
  CountEnvelope envelope() const override;
  double h() const override { return h_; }

 private:
  std::vector<EigenvalueEntry> entries_;
  double h_;
};

// 17 significant digits, locale independent.
std::string format_number(double x);

// CSV with header `value,multiplicity`.
std::string to_csv(const SpectrumSlice& s);
// {"cutoff":..,"complete":..,"entries":[[value,mult],...]}
std::string to_json(const SpectrumSlice& s);

}  // namespace adiabatic
