#include "adiabatic/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <tuple>
#include <variant>

#include "adiabatic/errors.hpp"
#include "adiabatic/heisenberg.hpp"
#include "adiabatic/quadrature.hpp"

namespace adiabatic {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kUnboundedSample = 10;

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    fit.max_residual = std::max(
        fit.max_residual, std::abs(y[i] - (fit.intercept + fit.slope * x[i])));
  }
  return fit;
}

std::string branch_label(const std::string& prefix, std::int64_t a,
                         std::int64_t b) {
  std::ostringstream out;
  out << prefix << '(' << a << ',' << b << ')';
  return out.str();
}

}  // namespace

double weyl_transform(const WeylInput& w, double lambda) {
  if (w.codim_q < 1) throw PreconditionError("weyl_transform requires q >= 1");
  const double half_q = 0.5 * w.codim_q;
  const double prefactor =
      std::pow(4.0 * kPi, -half_q) / std::tgamma(half_q + 1.0);

  if (const auto* gen = std::get_if<StepFunctionGenerator>(&w.leafwise_sdf)) {
    if (!std::isfinite(lambda)) {
      throw PreconditionError("weyl_transform requires finite lambda");
    }
    return prefactor * stieltjes_moment((*gen)(lambda), lambda, half_q);
  }

  const auto& sdf = std::get<ContinuousSdf>(w.leafwise_sdf);
  if (!(lambda > 0.0)) return 0.0;
  // tau = sigma^2 with sigma = sqrt(lambda) sin(theta): both the tau^{-1/2}
  // endpoint of the density and the (lambda - tau)^{q/2} endpoint become
  // smooth in theta.
  auto integrand = [&](double theta) {
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    const double tau = lambda * s * s;
    return std::pow(lambda * c * c, half_q) * sdf.density(tau) * 2.0 * lambda *
           s * c;
  };
  const double scale =
      std::max(1.0, sdf.value(lambda) * std::pow(lambda, half_q));
  const double moment =
      integrate_adaptive(integrand, 0.0, 0.5 * kPi, 1e-15 * scale).value;
  return prefactor * moment;
}

LeadingFit fit_leading_coefficient(std::span<const CountSample> samples,
                                   int codim_q) {
  if (samples.size() < 3) {
    throw PreconditionError("fit_leading_coefficient needs at least 3 samples");
  }
  std::vector<double> log_h;
  std::vector<double> log_count;
  for (const auto& s : samples) {
    if (!(s.h > 0.0)) throw PreconditionError("sample h must be positive");
    if (!(s.count > 0.0)) throw PreconditionError("sample count must be positive");
    if (std::find(log_h.begin(), log_h.end(), std::log(s.h)) != log_h.end()) {
      throw PreconditionError("sample h values must be distinct");
    }
    log_h.push_back(std::log(s.h));
    log_count.push_back(std::log(s.count));
  }
  const double q = static_cast<double>(codim_q);
  double intercept = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    intercept += log_count[i] + q * log_h[i];
  }
  intercept /= static_cast<double>(samples.size());

  LeadingFit fit;
  fit.coefficient = std::exp(intercept);
  for (const auto& s : samples) {
    const double model = fit.coefficient * std::pow(s.h, -q);
    fit.max_relative_residual =
        std::max(fit.max_relative_residual, std::abs(s.count / model - 1.0));
  }
  const LineFit free = least_squares(log_h, log_count);
  fit.free_slope = free.slope;
  fit.free_coefficient = std::exp(free.intercept);
  fit.model_mismatch = fit.max_relative_residual > kLeadingFitMismatch;
  return fit;
}

BranchSamples::BranchSamples(std::vector<double> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (grid_.size() != values_.size()) {
    throw PreconditionError("branch grid and values differ in length");
  }
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (!(grid_[i] > 0.0)) throw PreconditionError("branch grid must be positive");
    if (i > 0 && !(grid_[i] < grid_[i - 1])) {
      throw PreconditionError("branch grid must be strictly decreasing");
    }
    if (!(values_[i] >= 0.0)) {
      throw PreconditionError("branch values must be nonnegative");
    }
  }
}

BranchReport classify_branch(const BranchSamples& b,
                             const ClassifierConfig& config) {
  const auto grid = b.grid();
  const auto values = b.values();
  if (grid.size() < 4) {
    throw PreconditionError("classify_branch needs at least 4 grid points");
  }
  const double h_max = grid.front();
  const double h_min = grid.back();
  if (h_max < 10.0 * h_min * (1.0 - 1e-9)) {
    throw PreconditionError("classify_branch grid must span a decade of h");
  }

  const double largest = *std::max_element(values.begin(), values.end());
  const double threshold = config.zero_threshold * std::max(1.0, largest);
  if (std::all_of(values.begin(), values.end(),
                  [&](double v) { return v <= threshold; })) {
    return {BranchKind::Zero, 0, 0.0, 0.0, 0.0, false};
  }

  std::vector<double> log_h;
  std::vector<double> log_v;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] > 10.0 * h_min * (1.0 + 1e-9)) continue;
    if (!(values[i] > 0.0)) {
      throw AmbiguityError("branch vanishes on part of the grid", 0.0);
    }
    log_h.push_back(std::log(grid[i]));
    log_v.push_back(std::log(values[i]));
  }
  if (log_h.size() < 2) {
    throw PreconditionError("smallest decade of the grid needs two points");
  }
  const LineFit fit = least_squares(log_h, log_v);

  BranchReport report;
  report.fitted_slope = fit.slope;
  report.fit_residual = fit.max_residual;
  report.crossing_suspected = fit.max_residual > config.crossing_residual;

  const auto k = static_cast<int>(std::lround(fit.slope / 2.0));
  int power = 0;
  if (k >= 1 && std::abs(fit.slope - 2.0 * k) <= config.slope_tolerance) {
    report.kind = BranchKind::Order;
    report.order = k;
    power = 2 * k;
  } else if (std::abs(fit.slope) <= config.slope_tolerance) {
    report.kind = BranchKind::NotSmall;
  } else {
    std::ostringstream what;
    what << "ambiguous branch slope " << fit.slope;
    throw AmbiguityError(what.str(), fit.slope);
  }
  double log_c = 0.0;
  for (std::size_t i = 0; i < log_h.size(); ++i) {
    log_c += log_v[i] - power * log_h[i];
  }
  report.fitted_constant = std::exp(log_c / static_cast<double>(log_h.size()));
  return report;
}

SmallCountTable::SmallCountTable(std::vector<ExpectedCount> leading,
                                 ExpectedCount tail)
    : leading_(std::move(leading)), tail_(tail) {}

ExpectedCount SmallCountTable::at(int k) const {
  if (k < 1) throw PreconditionError("branch order k must be >= 1");
  const auto index = static_cast<std::size_t>(k - 1);
  return index < leading_.size() ? leading_[index] : tail_;
}

SmallCountTable expected_small_counts(SmallCountModel model, int degree) {
  const ExpectedCount unbounded{true, 0};
  auto finite = [](std::int64_t n) { return ExpectedCount{false, n}; };
  switch (model) {
    case SmallCountModel::TorusIrrational:
      // Only the index (0,0) contributes small eigenvalues.
      if (degree == 0 || degree == 2) return {{}, finite(1)};
      if (degree == 1) return {{}, finite(2)};
      break;
    case SmallCountModel::TorusRational:
      // Indices t(p, q) give infinitely many O(h^2) branches; the O(h^4)
      // ones are the identically zero ones.
      if (degree == 0 || degree == 2) return {{unbounded}, finite(1)};
      if (degree == 1) return {{unbounded}, finite(2)};
      break;
    case SmallCountModel::HeisenbergDiag:
      if (degree == 0 || degree == 3) return {{unbounded}, finite(1)};
      if (degree == 1 || degree == 2) return {{unbounded, unbounded}, finite(2)};
      break;
  }
  throw PreconditionError("no small-eigenvalue table for this model and degree");
}

std::vector<double> lowest_eigenvalues(const SliceGenerator& slices, double h,
                                       std::size_t count) {
  double cutoff = 1.0;
  for (int attempt = 0; attempt < 200; ++attempt) {
    const SpectrumSlice s = slices(h, cutoff);
    if (s.total_multiplicity() >= static_cast<std::int64_t>(count)) {
      return s.expanded(count);
    }
    cutoff *= 2.0;
  }
  throw PreconditionError("could not collect the requested eigenvalues");
}

BranchSource torus_branch_source(const SlopeParam& slope, int degree,
                                 BranchPairing pairing) {
  BranchSource source;
  source.model = slope.is_rational() ? SmallCountModel::TorusRational
                                     : SmallCountModel::TorusIrrational;
  source.degree = degree;
  source.pairing = pairing;
  source.slices = [slope, degree](double h, double cutoff) {
    return torus_spectrum(TorusModel(slope, h), degree, cutoff);
  };
  if (pairing == BranchPairing::Labeled) {
    if (degree == 1) {
      throw PreconditionError("labeled torus branches are defined for degrees 0 and 2");
    }
    source.families = [slope](double h_ref, std::size_t count) {
      const TorusModel ref(slope, h_ref);
      double cutoff = 1.0;
      std::vector<std::tuple<double, std::int64_t, std::int64_t>> found;
      for (;;) {
        found.clear();
        const std::int64_t r =
            static_cast<std::int64_t>(torus_index_radius(ref, cutoff)) + 1;
        for (std::int64_t l = -r; l <= r; ++l) {
          for (std::int64_t k = -r; k <= r; ++k) {
            const double v = torus_eigenvalue(ref, k, l);
            if (v <= cutoff) found.emplace_back(v, k, l);
          }
        }
        if (found.size() >= count) break;
        cutoff *= 2.0;
      }
      std::sort(found.begin(), found.end());
      std::vector<LabeledBranch> out;
      for (std::size_t i = 0; i < count; ++i) {
        const auto [v, k, l] = found[i];
        out.push_back({branch_label("lambda", k, l),
                       [slope, k = k, l = l](double h) {
                         return torus_eigenvalue(TorusModel(slope, h), k, l);
                       },
                       1});
      }
      return out;
    };
  }
  return source;
}

BranchSource heisenberg_branch_source(int degree) {
  BranchSource source;
  source.model = SmallCountModel::HeisenbergDiag;
  source.degree = degree;
  source.pairing = BranchPairing::IndexSorted;
  source.slices = [degree](double h, double cutoff) {
    return heis_form_spectrum(HeisenbergAdiabaticModel(h, 0.0), degree, cutoff);
  };
  return source;
}

std::int64_t BranchAudit::count(BranchKind kind) const {
  return std::count_if(branches.begin(), branches.end(),
                       [kind](const AuditedBranch& b) {
                         return b.report && b.report->kind == kind;
                       });
}

std::int64_t BranchAudit::count_order_at_least(int k) const {
  return std::count_if(branches.begin(), branches.end(),
                       [k](const AuditedBranch& b) {
                         if (!b.report) return false;
                         return b.report->kind == BranchKind::Zero ||
                                (b.report->kind == BranchKind::Order &&
                                 b.report->order >= k);
                       });
}

std::int64_t BranchAudit::ambiguous() const {
  return std::count_if(branches.begin(), branches.end(),
                       [](const AuditedBranch& b) { return !b.report; });
}

BranchAudit branch_audit(const BranchSource& source,
                         std::span<const double> h_grid, std::size_t i_max,
                         const ClassifierConfig& config) {
  if (i_max < 1) throw PreconditionError("branch_audit requires i_max >= 1");
  const SmallCountTable table = expected_small_counts(source.model, source.degree);
  const std::vector<double> grid(h_grid.begin(), h_grid.end());

  // rows[i][j]: branch i at grid point j.
  std::vector<std::vector<double>> rows(i_max, std::vector<double>(grid.size()));
  std::vector<std::string> labels(i_max);
  if (source.pairing == BranchPairing::IndexSorted) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const auto lowest = lowest_eigenvalues(source.slices, grid[j], i_max);
      for (std::size_t i = 0; i < i_max; ++i) rows[i][j] = lowest[i];
    }
    for (std::size_t i = 0; i < i_max; ++i) labels[i] = "lambda_" + std::to_string(i);
  } else {
    if (!source.families) {
      throw PreconditionError("labeled pairing requires a family generator");
    }
    const double h_ref = *std::max_element(grid.begin(), grid.end());
    std::vector<LabeledBranch> expanded;
    for (const auto& f : source.families(h_ref, i_max)) {
      for (std::int64_t m = 0; m < f.multiplicity && expanded.size() < i_max; ++m) {
        expanded.push_back(f);
      }
    }
    if (expanded.size() < i_max) {
      throw PreconditionError("family generator returned too few branches");
    }
    for (std::size_t i = 0; i < i_max; ++i) {
      labels[i] = expanded[i].label;
      for (std::size_t j = 0; j < grid.size(); ++j) {
        rows[i][j] = expanded[i].value(grid[j]);
      }
    }
  }

  BranchAudit audit;
  for (std::size_t i = 0; i < i_max; ++i) {
    AuditedBranch entry;
    entry.index = i;
    entry.label = labels[i];
    try {
      entry.report = classify_branch(BranchSamples(grid, rows[i]), config);
      entry.fitted_slope = entry.report->fitted_slope;
      entry.crossing_suspected = entry.report->crossing_suspected;
    } catch (const AmbiguityError& e) {
      entry.fitted_slope = e.fitted_slope();
      entry.crossing_suspected = true;
    }
    audit.branches.push_back(std::move(entry));
  }

  const std::int64_t unbounded_floor =
      static_cast<std::int64_t>(std::min(i_max, kUnboundedSample));
  for (int k = 1; k <= table.explicit_orders() + 1; ++k) {
    CountCheck check;
    check.k = k;
    check.expected = table.at(k);
    check.found = audit.count_order_at_least(k);
    check.ok = check.expected.unbounded ? check.found >= unbounded_floor
                                        : check.found == check.expected.count;
    if (!check.ok) {
      std::ostringstream what;
      what << "order >= " << k << ": expected "
           << (check.expected.unbounded
                   ? "at least " + std::to_string(unbounded_floor)
                   : std::to_string(check.expected.count))
           << ", found " << check.found;
      audit.mismatches.push_back(what.str());
    }
    audit.checks.push_back(check);
  }
  return audit;
}

std::vector<double> log_grid(double h_max, double h_min, std::size_t points) {
  if (!(h_max > h_min) || !(h_min > 0.0) || points < 2) {
    throw PreconditionError("log_grid requires h_max > h_min > 0 and 2 points");
  }
  std::vector<double> grid(points);
  const double span = std::log(h_min / h_max);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = h_max * std::exp(span * static_cast<double>(i) /
                               static_cast<double>(points - 1));
  }
  grid.front() = h_max;
  grid.back() = h_min;
  return grid;
}

std::string to_string(BranchKind kind) {
  switch (kind) {
    case BranchKind::Zero:
      return "zero";
    case BranchKind::Order:
      return "order";
    case BranchKind::NotSmall:
      return "not_small";
  }
  return "unknown";
}

}  // namespace adiabatic
