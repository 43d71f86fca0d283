#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adiabatic/spectrum.hpp"
#include "adiabatic/torus.hpp"

namespace adiabatic {

// Codimension of the foliation together with the spectrum distribution
// function of its leafwise Laplacian. Continuous variants are assumed to
// vanish for tau <= 0.
struct WeylInput {
  int codim_q = 1;
  LeafwiseSdf leafwise_sdf;
};

/// h^{-q} coefficient of the semiclassical counting asymptotics:
///
///     (4 pi)^{-q/2} / Gamma(q/2 + 1) * int_{-inf}^{lambda}
///         (lambda - tau)^{q/2} d N_F(tau)
double weyl_transform(const WeylInput& w, double lambda);

struct CountSample {
  double h = 0.0;
  double count = 0.0;
};

// Relative residual above which a fixed-slope fit is flagged as a mismatch.
inline constexpr double kLeadingFitMismatch = 0.1;

struct LeadingFit {
  double coefficient = 0.0;            // C in count ~ C h^{-q}
  double max_relative_residual = 0.0;  // max |count / (C h^{-q}) - 1|
  double free_slope = 0.0;             // diagnostic: unconstrained log-log slope
  double free_coefficient = 0.0;
  bool model_mismatch = false;
};

LeadingFit fit_leading_coefficient(std::span<const CountSample> samples,
                                   int codim_q);

/// Samples of one eigenvalue branch on a strictly decreasing h grid.
class BranchSamples {
 public:
  BranchSamples(std::vector<double> grid, std::vector<double> values);

  std::span<const double> grid() const { return grid_; }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<double> grid_;
  std::vector<double> values_;
};

enum class BranchKind { Zero, Order, NotSmall };

struct BranchReport {
  BranchKind kind = BranchKind::NotSmall;
  int order = 0;                 // k of lambda(h) = Theta(h^{2k}) for Order
  double fitted_slope = 0.0;
  double fitted_constant = 0.0;  // leading coefficient of h^{2k}
  double fit_residual = 0.0;     // max |log residual| of the slope fit
  bool crossing_suspected = false;
};

struct ClassifierConfig {
  double slope_tolerance = 0.2;
  double zero_threshold = 1e-14;
  double crossing_residual = 0.1;
};

/// Zero, Order(k) or NotSmall from a log-log slope fit over the smallest
/// decade of h. Throws AmbiguityError when the slope is near neither 0 nor
/// an even positive integer.
BranchReport classify_branch(const BranchSamples& b,
                             const ClassifierConfig& config = {});

enum class SmallCountModel { TorusIrrational, TorusRational, HeisenbergDiag };

struct ExpectedCount {
  bool unbounded = false;
  std::int64_t count = 0;

  friend bool operator==(const ExpectedCount&, const ExpectedCount&) = default;
};

/// Number of eigenvalue branches of order h^{2k}, for k >= 1.
class SmallCountTable {
 public:
  SmallCountTable(std::vector<ExpectedCount> leading, ExpectedCount tail);

  // Expected count for k >= 1.
  ExpectedCount at(int k) const;
  // Largest k with an entry differing from the tail value.
  int explicit_orders() const { return static_cast<int>(leading_.size()); }

 private:
  std::vector<ExpectedCount> leading_;
  ExpectedCount tail_;
};

SmallCountTable expected_small_counts(SmallCountModel model, int degree);

enum class BranchPairing {
  // i-th smallest eigenvalue at each h forms branch i.
  IndexSorted,
  // Branches follow analytic families by label, chosen as the lowest ones
  // at the largest grid value of h.
  Labeled,
};

struct LabeledBranch {
  std::string label;
  std::function<double(double h)> value;
  std::int64_t multiplicity = 1;
};

using SliceGenerator = std::function<SpectrumSlice(double h, double cutoff)>;
using LabeledGenerator =
    std::function<std::vector<LabeledBranch>(double h_ref, std::size_t count)>;

struct BranchSource {
  SmallCountModel model = SmallCountModel::HeisenbergDiag;
  int degree = 0;
  BranchPairing pairing = BranchPairing::IndexSorted;
  SliceGenerator slices;
  LabeledGenerator families;
};

BranchSource torus_branch_source(const SlopeParam& slope, int degree,
                                 BranchPairing pairing);
// Diagonal adiabatic Heisenberg model (alpha = 0); index-sorted pairing.
BranchSource heisenberg_branch_source(int degree);

// The `count` smallest eigenvalues (with multiplicity) of a slice generator.
std::vector<double> lowest_eigenvalues(const SliceGenerator& slices, double h,
                                       std::size_t count);

struct AuditedBranch {
  std::size_t index = 0;
  std::string label;
  std::optional<BranchReport> report;  // empty when ambiguous
  double fitted_slope = 0.0;
  bool crossing_suspected = false;
};

struct CountCheck {
  int k = 0;
  ExpectedCount expected;
  std::int64_t found = 0;
  bool ok = false;
};

struct BranchAudit {
  std::vector<AuditedBranch> branches;
  std::vector<CountCheck> checks;
  std::vector<std::string> mismatches;

  bool matches() const { return mismatches.empty(); }
  std::int64_t count(BranchKind kind) const;
  // Branches classified Zero or Order(k') with k' >= k.
  std::int64_t count_order_at_least(int k) const;
  std::int64_t ambiguous() const;
};

/// Tracks the first `i_max` branches across `h_grid` (strictly decreasing),
/// classifies each and compares the counts of branches of order >= k with
/// the expected table. Unbounded entries require at least min(i_max, 10).
BranchAudit branch_audit(const BranchSource& source,
                         std::span<const double> h_grid, std::size_t i_max,
                         const ClassifierConfig& config = {});

// Strictly decreasing logarithmic grid from h_max down to h_min.
std::vector<double> log_grid(double h_max, double h_min, std::size_t points);

std::string to_string(BranchKind kind);

}  // namespace adiabatic
