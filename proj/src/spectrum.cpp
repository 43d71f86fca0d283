#include "adiabatic/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "adiabatic/errors.hpp"

namespace adiabatic {
namespace {

void sort_and_merge_exact(std::vector<EigenvalueEntry>& entries) {
  std::sort(entries.begin(), entries.end(),
            [](const EigenvalueEntry& a, const EigenvalueEntry& b) {
              return a.value < b.value;
            });
  std::size_t out = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (out > 0 && entries[out - 1].value == entries[i].value) {
      entries[out - 1].multiplicity += entries[i].multiplicity;
    } else {
      entries[out++] = entries[i];
    }
  }
  entries.resize(out);
}

bool near(double a, double b) {
  return std::abs(a - b) <=
         kNearCollisionTolerance * std::max(std::abs(a), std::abs(b));
}

}  // namespace

SpectrumSlice SpectrumSlice::FromEntries(double cutoff,
                                         std::vector<EigenvalueEntry> raw,
                                         bool complete,
                                         std::string provenance) {
  if (!(cutoff > 0.0) || !std::isfinite(cutoff)) {
    throw PreconditionError("spectrum slice cutoff must be positive and finite");
  }
  std::erase_if(raw, [cutoff](const EigenvalueEntry& e) {
    return e.value > cutoff;
  });
  for (const auto& e : raw) {
    if (!(e.value >= 0.0)) {
      throw PreconditionError("eigenvalue must be nonnegative");
    }
    if (e.multiplicity < 1) {
      throw PreconditionError("eigenvalue multiplicity must be positive");
    }
  }
  sort_and_merge_exact(raw);
  SpectrumSlice s;
  s.cutoff_ = cutoff;
  s.entries_ = std::move(raw);
  s.complete_ = complete;
  if (!provenance.empty()) s.provenance_.push_back(std::move(provenance));
  return s;
}

std::int64_t SpectrumSlice::total_multiplicity() const {
  std::int64_t total = 0;
  for (const auto& e : entries_) total += e.multiplicity;
  return total;
}

std::vector<double> SpectrumSlice::expanded(std::size_t limit) const {
  std::vector<double> out;
  for (const auto& e : entries_) {
    for (std::int64_t m = 0; m < e.multiplicity; ++m) {
      if (out.size() >= limit) return out;
      out.push_back(e.value);
    }
  }
  return out;
}

SpectrumSlice merge(const SpectrumSlice& a, const SpectrumSlice& b) {
  if (a.cutoff_ != b.cutoff_) {
    throw PreconditionError("merge requires slices with equal cutoffs");
  }
  struct Tagged {
    EigenvalueEntry entry;
    int origin;
  };
  std::vector<Tagged> tagged;
  tagged.reserve(a.entries_.size() + b.entries_.size());
  for (const auto& e : a.entries_) tagged.push_back({e, 0});
  for (const auto& e : b.entries_) tagged.push_back({e, 1});
  std::stable_sort(tagged.begin(), tagged.end(),
                   [](const Tagged& x, const Tagged& y) {
                     return x.entry.value < y.entry.value;
                   });

  SpectrumSlice out;
  out.cutoff_ = a.cutoff_;
  out.complete_ = a.complete_ && b.complete_;
  out.near_collision_ = a.near_collision_ || b.near_collision_;
  out.provenance_ = a.provenance_;
  out.provenance_.insert(out.provenance_.end(), b.provenance_.begin(),
                         b.provenance_.end());

  int last_origin = -1;
  for (const auto& t : tagged) {
    if (!out.entries_.empty() && out.entries_.back().value == t.entry.value) {
      out.entries_.back().multiplicity += t.entry.multiplicity;
      last_origin = t.origin;
      continue;
    }
    if (!out.entries_.empty() && last_origin != t.origin &&
        near(out.entries_.back().value, t.entry.value)) {
      out.near_collision_ = true;
    }
    out.entries_.push_back(t.entry);
    last_origin = t.origin;
  }
  return out;
}

std::int64_t count_below(const SpectrumSlice& s, double lambda,
                         CountMode mode) {
  if (!s.complete()) {
    throw PreconditionError("count_below requires a complete spectrum slice");
  }
  if (lambda > s.cutoff()) {
    throw PreconditionError("count_below: lambda exceeds the certified cutoff");
  }
  std::int64_t count = 0;
  for (const auto& e : s.entries()) {
    const bool inside =
        mode == CountMode::Closed ? e.value <= lambda : e.value < lambda;
    if (!inside) break;
    count += e.multiplicity;
  }
  return count;
}

StepFunction::StepFunction(std::vector<Jump> jumps) : jumps_(std::move(jumps)) {
  for (std::size_t i = 0; i < jumps_.size(); ++i) {
    if (!(jumps_[i].size > 0.0)) {
      throw PreconditionError("step function jump sizes must be positive");
    }
    if (i > 0 && !(jumps_[i].location > jumps_[i - 1].location)) {
      throw PreconditionError(
          "step function jump locations must be strictly increasing");
    }
  }
}

double StepFunction::operator()(double tau) const {
  double total = 0.0;
  for (const auto& j : jumps_) {
    if (j.location > tau) break;
    total += j.size;
  }
  return total;
}

double stieltjes_moment(const StepFunction& f, double lambda, double exponent) {
  if (!(exponent >= 0.0)) {
    throw PreconditionError("stieltjes_moment exponent must be nonnegative");
  }
  double total = 0.0;
  for (const auto& j : f.jumps()) {
    if (j.location > lambda) break;
    // pow(0, 0) is 1, which keeps the exponent-0 moment equal to f(lambda).
    total += j.size * std::pow(lambda - j.location, exponent);
  }
  return total;
}

double CountEnvelope::operator()(double lambda) const {
  return constant * std::pow(1.0 + std::max(lambda, 0.0), degree);
}

CountEnvelope operator+(const CountEnvelope& a, const CountEnvelope& b) {
  // (1+x)^d <= (1+x)^max(d) for x >= 0.
  return {a.constant + b.constant, std::max(a.degree, b.degree)};
}

FixedSpectrumSource::FixedSpectrumSource(std::vector<EigenvalueEntry> entries,
                                         double h)
    : entries_(std::move(entries)), h_(h) {}

SpectrumSlice FixedSpectrumSource::slice(double cutoff) const {
  return SpectrumSlice::FromEntries(cutoff, entries_, true,
                                    "fixed finite spectrum");
}

CountEnvelope FixedSpectrumSource::envelope() const {
  double total = 0.0;
  for (const auto& e : entries_) total += static_cast<double>(e.multiplicity);
  return {4.0 * total, 0};
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_csv(const SpectrumSlice& s) {
  std::ostringstream out;
  out << "value,multiplicity\n";
  for (const auto& e : s.entries()) {
    out << format_number(e.value) << ',' << e.multiplicity << '\n';
  }
  return out.str();
}

std::string to_json(const SpectrumSlice& s) {
  std::ostringstream out;
  out << "{\"cutoff\":" << format_number(s.cutoff())
      << ",\"complete\":" << (s.complete() ? "true" : "false")
      << ",\"entries\":[";
  bool first = true;
  for (const auto& e : s.entries()) {
    if (!first) out << ',';
    first = false;
    out << '[' << format_number(e.value) << ',' << e.multiplicity << ']';
  }
  out << "]}";
  return out.str();
}

}  // namespace adiabatic
