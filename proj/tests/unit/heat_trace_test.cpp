#include "adiabatic/heat_trace.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "adiabatic/errors.hpp"
#include "adiabatic/quadrature.hpp"
#include "adiabatic/torus.hpp"
#include "oracles.hpp"

namespace adiabatic {
namespace {

constexpr double kPi = std::numbers::pi;

// Reference values of int_R eta / sinh(t eta) exp(-t eta^2) d eta computed
// with 30-digit arithmetic.
constexpr double kI1 = 1.64549375652850766808;
constexpr double kIHalf = 4.82059329247811272294;
constexpr double kI2 = 0.547053126766951847374;

TEST(HeatTrace, SingleZeroModeIsOne) {
  const FixedSpectrumSource src({{0.0, 1}});
  for (double t : {0.01, 0.5, 1.0, 30.0}) {
    const auto r = heat_trace(src, t, 1e-12);
    EXPECT_EQ(r.value, 1.0) << t;
    EXPECT_LE(r.truncation_bound, 1e-12);
  }
}

TEST(HeatTrace, TorusLargeTimeLeavesTheZeroMode) {
  const TorusSource src(TorusModel(SlopeParam::Rational(0, 1), 1.0), 0);
  const auto r = heat_trace(src, 50.0, 1e-9);
  EXPECT_GE(r.value, 1.0);
  EXPECT_LE(r.value - 1.0, r.truncation_bound + 1e-9);
  EXPECT_LE(r.truncation_bound, 1e-9);
}

TEST(HeatTrace, HeisenbergAgainstDirectBoxSum) {
  const double h = 0.1;
  const double eps = 1e-10;
  const auto r = heat_trace(HeisenbergSource(HeisenbergAdiabaticModel(h, 0.0), 0), 1.0, eps);
  // exp(-80) * (everything up to 10^6 eigenvalues) is far below eps.
  const auto values = oracle::heis_diag_functions(h, 80.0);
  long double direct = 0.0L;
  for (double v : values) direct += std::exp(-static_cast<long double>(v));
  EXPECT_NEAR(r.value, static_cast<double>(direct), 2 * eps);
  EXPECT_LE(r.truncation_bound, eps);
}

TEST(HeatTrace, TailBoundIsHonest) {
  for (double h : {0.5, 0.1}) {
    const HeisenbergSource src(HeisenbergAdiabaticModel(h, 0.0), 0);
    const auto r = heat_trace(src, 1.0, 1e-6);
    const auto wide = src.slice(2.0 * r.cutoff);
    long double sum = 0.0L;
    for (const auto& e : wide.entries()) {
      sum += e.multiplicity * std::exp(-static_cast<long double>(e.value));
    }
    EXPECT_LE(static_cast<double>(sum) - r.value, r.truncation_bound) << h;
    EXPECT_GE(static_cast<double>(sum) - r.value, -1e-12);
  }
}

TEST(HeatTrace, DecreasingInTime) {
  const HeisenbergSource src(HeisenbergAdiabaticModel(0.2, 0.0), 1);
  double previous = INFINITY;
  for (double t : {0.2, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double v = heat_trace(src, t, 1e-10).value;
    EXPECT_LT(v, previous) << t;
    previous = v;
  }
}

TEST(HeatTrace, Preconditions) {
  const FixedSpectrumSource src({{0.0, 1}});
  EXPECT_THROW(heat_trace(src, 0.0, 1e-9), PreconditionError);
  EXPECT_THROW(heat_trace(src, 1.0, 0.0), PreconditionError);
}

TEST(HeatTailBound, MatchesQuadratureOfTheEnvelope) {
  const CountEnvelope env{3.0, 2};
  const double t = 0.7;
  const double cutoff = 20.0;
  auto integrand = [&](double lambda) {
    return t * env.constant * std::pow(1 + lambda, 2) * std::exp(-t * lambda);
  };
  const double numeric = integrate_adaptive(integrand, cutoff, cutoff + 200.0, 1e-14).value;
  EXPECT_NEAR(heat_tail_bound(env, t, cutoff) / numeric, 1.0, 1e-9);
}

TEST(LimitIntegrand, ExtensionAtZero) {
  for (double t : {0.25, 1.0, 3.0}) EXPECT_EQ(limit_integrand(0.0, t), 1.0 / t);
  EXPECT_GT(limit_integrand(5.0, 1.0), 0.0);
  EXPECT_EQ(limit_integrand(50.0, 1.0), 0.0);  // exp(-2500) underflows
  EXPECT_TRUE(std::isfinite(limit_integrand(1e3, 1.0)));
}

TEST(LimitIntegral, PinnedValues) {
  EXPECT_NEAR(limit_integral(1.0, 1e-12), kI1, 1e-11);
  EXPECT_NEAR(limit_integral(0.5, 1e-12), kIHalf, 1e-11);
  EXPECT_NEAR(limit_integral(2.0, 1e-12), kI2, 1e-11);
}

TEST(LimitIntegral, PositiveAndTolerantOfPanelChoice) {
  for (double t : {0.5, 1.0, 2.0}) {
    const double one = limit_integral(t, 1e-10, 1);
    EXPECT_GT(one, 0.0);
    EXPECT_NEAR(limit_integral(t, 1e-10, 2), one, 1e-10);
    EXPECT_NEAR(limit_integral(t, 1e-10, 4), one, 1e-10);
  }
}

TEST(RiemannianReference, Values) {
  EXPECT_NEAR(riemannian_reference(1.0), 0.14104739588693907, 1e-15);
  EXPECT_NEAR(riemannian_reference(4.0), 1.0 / (32.0 * std::sqrt(kPi)), 1e-16);
  for (double t : {0.5, 1.0, 3.0}) {
    const double gaussian = 2.0 * integrate_adaptive(
                                      [t](double eta) { return std::exp(-t * eta * eta); },
                                      0.0, 40.0, 1e-15)
                                      .value;
    EXPECT_NEAR(gaussian / (4 * kPi * t), riemannian_reference(t), 1e-14);
  }
}

// A source whose trace is exactly h^-2 / (4 sqrt(pi t^3)) closes the loop.
TEST(TraceRatio, SurrogateRiemannianFlow) {
  const double t = 1.3;
  for (double h : {0.5, 0.1, 0.02}) {
    const double target = riemannian_reference(t) / (h * h);
    const double m = std::ceil(target);
    const double v = std::log(m / target) / t;
    const FixedSpectrumSource src({{v, static_cast<std::int64_t>(m)}}, h);
    const auto r = heat_trace(src, t, 1e-12);
    EXPECT_NEAR(trace_ratio_from(r.value, h, riemannian_reference(t)), 1.0, 1e-12) << h;
  }
}

TEST(TraceRatio, FiniteAndPositiveAtUnitScale) {
  const double r = trace_ratio(HeisenbergAdiabaticModel(1.0, 0.0), 1.0, 1e-10);
  EXPECT_TRUE(std::isfinite(r));
  EXPECT_GT(r, 0.0);
}

// The exact trace satisfies h^2 tr ~ I(t) / (8 pi^2), so the normalized
// ratio drifts towards 1/(2 pi); it never approaches 1.
TEST(TraceRatio, DriftsTowardsOneOverTwoPi) {
  double previous_gap = INFINITY;
  double previous_ratio = INFINITY;
  for (double h : {0.2, 0.1, 0.05, 0.02}) {
    const double r = trace_ratio(HeisenbergAdiabaticModel(h, 0.0), 1.0, 1e-10);
    EXPECT_LT(r, previous_ratio);
    const double gap = std::abs(2 * kPi * r - 1.0);
    EXPECT_LT(gap, previous_gap) << h;
    previous_gap = gap;
    previous_ratio = r;
  }
  EXPECT_LT(previous_gap, 0.25);
}

}  // namespace
}  // namespace adiabatic
