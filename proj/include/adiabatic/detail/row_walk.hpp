#pragma once

#include <cmath>
#include <cstdint>

namespace adiabatic::detail {

// Integer solutions of a convex quadratic inequality in one variable.
//
// `vertex` and `half_width` describe the real solution interval (half_width
// is 0 when the discriminant is negative). The end points are settled with
// the exact predicate `ok`, so rounding in the root formula cannot drop or
// add a point. Returns false when no integer satisfies `ok`.
template <class Pred>
bool settle_row(double vertex, double half_width, Pred ok, std::int64_t& lo,
                std::int64_t& hi) {
  lo = static_cast<std::int64_t>(std::ceil(vertex - half_width));
  hi = static_cast<std::int64_t>(std::floor(vertex + half_width));
  if (lo > hi) {
    const auto k0 = static_cast<std::int64_t>(std::llround(vertex));
    if (!ok(k0)) return false;
    lo = hi = k0;
  }
  while (lo <= hi && !ok(lo)) ++lo;
  while (hi >= lo && !ok(hi)) --hi;
  if (lo > hi) return false;
  while (ok(lo - 1)) --lo;
  while (ok(hi + 1)) ++hi;
  return true;
}

// Solution interval of a x^2 + b x + c <= 0 for a > 0.
inline void quadratic_interval(double a, double b, double c, double& vertex,
                               double& half_width) {
  vertex = -b / (2.0 * a);
  const double disc = b * b - 4.0 * a * c;
  half_width = disc > 0.0 ? std::sqrt(disc) / (2.0 * a) : 0.0;
}

// Index bound with one unit of slack above a real radius.
inline std::int64_t index_bound(double radius) {
  if (!(radius > 0.0)) return 0;
  return static_cast<std::int64_t>(std::floor(radius * (1.0 + 1e-12))) + 1;
}

}  // namespace adiabatic::detail
