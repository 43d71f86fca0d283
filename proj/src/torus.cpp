#include "adiabatic/torus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>
#include <vector>

#include "adiabatic/detail/row_walk.hpp"
#include "adiabatic/errors.hpp"

namespace adiabatic {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourPiSq = 4.0 * kPi * kPi;

void check_degree(int degree) {
  if (degree < 0 || degree > 2) {
    throw PreconditionError("torus form degree must be 0, 1 or 2");
  }
}

bool admits(double value, double lambda, CountMode mode) {
  return mode == CountMode::Closed ? value <= lambda : value < lambda;
}

bool row_range(const TorusModel& m, std::int64_t l, double lambda,
               CountMode mode, std::int64_t& lo, std::int64_t& hi) {
  const double alpha = m.slope.alpha();
  const double h2 = m.h * m.h;
  const double scale = kFourPiSq / (1.0 + alpha * alpha);
  const double ld = static_cast<double>(l);
  double vertex = 0.0;
  double half_width = 0.0;
  // Eigenvalue / scale as a quadratic in k for fixed l.
  detail::quadratic_interval(1.0 + h2 * alpha * alpha,
                             2.0 * alpha * ld * (1.0 - h2),
                             (alpha * alpha + h2) * ld * ld - lambda / scale,
                             vertex, half_width);
  return detail::settle_row(
      vertex, half_width,
      [&](std::int64_t k) {
        return admits(torus_eigenvalue(m, k, l), lambda, mode);
      },
      lo, hi);
}

std::string bound_provenance(const TorusModel& m, double cutoff) {
  std::ostringstream out;
  out << "torus " << m.slope.describe() << " h=" << format_number(m.h)
      << ": u^2+h^2 v^2 <= cutoff/(4pi^2) implies k^2+l^2 <= R^2 with R="
      << format_number(torus_index_radius(m, cutoff))
      << "; rows |l| <= floor(R)+1 scanned, k from the per-row quadratic";
  return out.str();
}

// Degree-0 values (with multiplicity 1 per index pair) that satisfy the
// predicate, collected row by row.
std::vector<double> degree0_values(const TorusModel& m, double lambda,
                                   CountMode mode) {
  std::vector<double> values;
  if (lambda < 0.0) return values;
  const std::int64_t lmax = detail::index_bound(torus_index_radius(m, lambda));
  for (std::int64_t l = -lmax; l <= lmax; ++l) {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    if (!row_range(m, l, lambda, mode, lo, hi)) continue;
    for (std::int64_t k = lo; k <= hi; ++k) {
      values.push_back(torus_eigenvalue(m, k, l));
    }
  }
  return values;
}

std::int64_t count_rows(const TorusModel& m, double lambda, CountMode mode,
                        std::int64_t first, std::int64_t last) {
  std::int64_t count = 0;
  for (std::int64_t l = first; l <= last; ++l) {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    if (row_range(m, l, lambda, mode, lo, hi)) count += hi - lo + 1;
  }
  return count;
}

}  // namespace

SlopeParam SlopeParam::Rational(std::int64_t p, std::int64_t q) {
  if (q == 0) throw PreconditionError("rational slope requires q != 0");
  if (q < 0) {
    p = -p;
    q = -q;
  }
  const std::int64_t g = std::gcd(p < 0 ? -p : p, q);
  SlopeParam s;
  s.rational_ = true;
  s.p_ = p / g;
  s.q_ = q / g;
  s.alpha_ = static_cast<double>(s.p_) / static_cast<double>(s.q_);
  return s;
}

SlopeParam SlopeParam::Irrational(double alpha) {
  if (!std::isfinite(alpha)) {
    throw PreconditionError("irrational slope must be finite");
  }
  SlopeParam s;
  s.rational_ = false;
  s.alpha_ = alpha;
  return s;
}

std::string SlopeParam::describe() const {
  std::ostringstream out;
  if (rational_) {
    out << "rational(" << p_ << '/' << q_ << ')';
  } else {
    out << "irrational(" << format_number(alpha_) << ')';
  }
  return out.str();
}

TorusModel::TorusModel(SlopeParam slope_in, double h_in)
    : slope(slope_in), h(h_in) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw PreconditionError("torus model requires h > 0");
  }
}

double torus_eigenvalue(const TorusModel& m, std::int64_t k, std::int64_t l) {
  const double alpha = m.slope.alpha();
  const double kd = static_cast<double>(k);
  const double ld = static_cast<double>(l);
  const double along = kd + alpha * ld;
  const double across = -alpha * kd + ld;
  return kFourPiSq * (along * along + m.h * m.h * across * across) /
         (1.0 + alpha * alpha);
}

double torus_index_radius(const TorusModel& m, double cutoff) {
  if (cutoff <= 0.0) return 0.0;
  return std::sqrt(cutoff) / (2.0 * kPi) * std::sqrt(1.0 + 1.0 / (m.h * m.h));
}

SpectrumSlice torus_spectrum(const TorusModel& m, int degree, double cutoff) {
  check_degree(degree);
  if (!(cutoff > 0.0)) {
    throw PreconditionError("torus_spectrum requires cutoff > 0");
  }
  std::vector<EigenvalueEntry> raw;
  for (double v : degree0_values(m, cutoff, CountMode::Closed)) {
    raw.push_back({v, 1});
  }
  auto base = SpectrumSlice::FromEntries(cutoff, std::move(raw), true,
                                         bound_provenance(m, cutoff));
  if (degree != 1) return base;

  const auto entries = base.entries();
  std::vector<EigenvalueEntry> sums;
  for (const auto& first : entries) {
    for (const auto& second : entries) {
      const double v = first.value + second.value;
      if (v > cutoff) break;
      sums.push_back({v, 2 * first.multiplicity * second.multiplicity});
    }
  }
  return SpectrumSlice::FromEntries(
      cutoff, std::move(sums), true,
      bound_provenance(m, cutoff) +
          "; degree 1: ordered pairs of degree-0 entries with sum <= cutoff");
}

std::int64_t torus_count_exact(const TorusModel& m, double lambda, int degree,
                               CountMode mode, unsigned threads) {
  check_degree(degree);
  if (lambda < 0.0 || std::isnan(lambda)) return 0;

  if (degree == 1) {
    // Both summands of an admissible pair satisfy the closed predicate.
    std::vector<double> values = degree0_values(m, lambda, CountMode::Closed);
    std::sort(values.begin(), values.end());
    std::int64_t pairs = 0;
    for (double first : values) {
      const auto end = std::partition_point(
          values.begin(), values.end(),
          [&](double second) { return admits(first + second, lambda, mode); });
      pairs += end - values.begin();
    }
    return 2 * pairs;
  }

  const std::int64_t lmax = detail::index_bound(torus_index_radius(m, lambda));
  const std::int64_t rows = 2 * lmax + 1;
  const std::int64_t workers =
      std::clamp<std::int64_t>(threads == 0 ? std::thread::hardware_concurrency()
                                            : threads,
                               1, rows);
  if (workers == 1) return count_rows(m, lambda, mode, -lmax, lmax);

  std::vector<std::int64_t> partial(static_cast<std::size_t>(workers), 0);
  std::vector<std::thread> pool;
  const std::int64_t chunk = (rows + workers - 1) / workers;
  for (std::int64_t w = 0; w < workers; ++w) {
    const std::int64_t first = -lmax + w * chunk;
    const std::int64_t last = std::min(lmax, first + chunk - 1);
    pool.emplace_back([&, w, first, last] {
      partial[static_cast<std::size_t>(w)] =
          first <= last ? count_rows(m, lambda, mode, first, last) : 0;
    });
  }
  for (auto& t : pool) t.join();
  return std::accumulate(partial.begin(), partial.end(), std::int64_t{0});
}

double torus_predicted_count(const SlopeParam& slope, double lambda, double h) {
  if (!(h > 0.0)) throw PreconditionError("torus_predicted_count requires h > 0");
  if (!(lambda > 0.0)) return 0.0;
  if (!slope.is_rational()) return lambda / (4.0 * kPi * h);

  const double p = static_cast<double>(slope.p());
  const double q = static_cast<double>(slope.q());
  const double n2 = p * p + q * q;
  const double level = kFourPiSq / n2;
  double sum = 0.0;
  for (std::int64_t k = 0;; ++k) {
    const double kd = static_cast<double>(k);
    const double tau = level * kd * kd;
    if (!(tau < lambda)) break;
    sum += (k == 0 ? 1.0 : 2.0) * std::sqrt(lambda - tau);
  }
  return sum / (kPi * std::sqrt(n2) * h);
}

LeafwiseSdf torus_leafwise_sdf(const SlopeParam& slope) {
  if (!slope.is_rational()) {
    return ContinuousSdf{
        [](double lambda) { return std::sqrt(std::max(lambda, 0.0)) / kPi; },
        [](double lambda) {
          return lambda > 0.0 ? 1.0 / (2.0 * kPi * std::sqrt(lambda)) : 0.0;
        }};
  }
  const double p = static_cast<double>(slope.p());
  const double q = static_cast<double>(slope.q());
  const double n2 = p * p + q * q;
  return StepFunctionGenerator{[n2](double bound) {
    std::vector<Jump> jumps;
    const double level = kFourPiSq / n2;
    const double unit = 1.0 / std::sqrt(n2);
    for (std::int64_t k = 0;; ++k) {
      const double kd = static_cast<double>(k);
      const double location = level * kd * kd;
      if (location > bound) break;
      jumps.push_back({location, k == 0 ? unit : 2.0 * unit});
    }
    return StepFunction(std::move(jumps));
  }};
}

TorusSource::TorusSource(TorusModel model, int degree)
    : model_(model), degree_(degree) {
  check_degree(degree);
  // Lattice points in a disk of radius R number at most pi (R + 1/sqrt 2)^2
  // <= 2 pi R^2 + pi, and R^2 = lambda (1 + h^-2) / (4 pi^2).
  const double base =
      (1.0 + 1.0 / (model_.h * model_.h)) / (2.0 * kPi) + kPi;
  if (degree_ == 1) {
    envelope_ = {4.0 * 2.0 * base * base, 2};
  } else {
    envelope_ = {4.0 * base, 1};
  }
}

SpectrumSlice TorusSource::slice(double cutoff) const {
  return torus_spectrum(model_, degree_, cutoff);
}

}  // namespace adiabatic
