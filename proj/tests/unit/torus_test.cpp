#include "adiabatic/torus.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "adiabatic/errors.hpp"
#include "oracles.hpp"

namespace adiabatic {
namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt2 = std::sqrt(2.0);

bool same_entries(const SpectrumSlice& a, const SpectrumSlice& b) {
  return std::equal(a.entries().begin(), a.entries().end(), b.entries().begin(),
                    b.entries().end());
}

std::int64_t multiplicity_of(const SpectrumSlice& s, double value) {
  for (const auto& e : s.entries()) {
    if (std::abs(e.value - value) <= 1e-12 * std::max(1.0, value)) return e.multiplicity;
  }
  return 0;
}

TEST(SlopeParam, RationalIsReduced) {
  const auto s = SlopeParam::Rational(4, -6);
  EXPECT_TRUE(s.is_rational());
  EXPECT_EQ(s.p(), -2);
  EXPECT_EQ(s.q(), 3);
  EXPECT_DOUBLE_EQ(s.alpha(), -2.0 / 3.0);
  EXPECT_THROW(SlopeParam::Rational(1, 0), PreconditionError);
  EXPECT_FALSE(SlopeParam::Irrational(kSqrt2).is_rational());
}

TEST(TorusModel, RejectsNonPositiveH) {
  EXPECT_THROW(TorusModel(SlopeParam::Rational(0, 1), 0.0), PreconditionError);
  EXPECT_THROW(TorusModel(SlopeParam::Rational(0, 1), -1.0), PreconditionError);
}

TEST(TorusEigenvalue, Examples) {
  const TorusModel any(SlopeParam::Irrational(0.37), 0.2);
  EXPECT_EQ(torus_eigenvalue(any, 0, 0), 0.0);
  EXPECT_NEAR(torus_eigenvalue(TorusModel(SlopeParam::Rational(0, 1), 1.0), 1, 0),
              39.47841760435743, 1e-12);
  EXPECT_NEAR(torus_eigenvalue(TorusModel(SlopeParam::Rational(1, 1), 0.5), 1, -1),
              2.0 * kPi * kPi, 1e-12);
}

TEST(TorusEigenvalue, PositiveAwayFromOrigin) {
  const TorusModel m(SlopeParam::Irrational(kSqrt2), 0.01);
  for (std::int64_t k = -30; k <= 30; ++k) {
    for (std::int64_t l = -30; l <= 30; ++l) {
      if (k == 0 && l == 0) continue;
      EXPECT_GT(torus_eigenvalue(m, k, l), 0.0) << k << "," << l;
    }
  }
}

TEST(TorusSpectrum, IdentityTorusLowLevels) {
  const TorusModel m(SlopeParam::Rational(0, 1), 1.0);
  const auto s = torus_spectrum(m, 0, 50.0);
  EXPECT_TRUE(s.complete());
  EXPECT_EQ(s.entries()[0], (EigenvalueEntry{0.0, 1}));
  EXPECT_EQ(multiplicity_of(s, 4.0 * kPi * kPi), 4);
  // 8 pi^2 ~ 78.96 sits above 50; a larger cutoff reaches it.
  EXPECT_EQ(multiplicity_of(torus_spectrum(m, 0, 80.0), 8.0 * kPi * kPi), 4);
  EXPECT_EQ(s.total_multiplicity(), 5);
}

TEST(TorusSpectrum, DegreeTwoEqualsDegreeZero) {
  for (const auto& slope : {SlopeParam::Irrational(kSqrt2), SlopeParam::Rational(3, 5)}) {
    for (double h : {1.0, 0.3, 0.05}) {
      const TorusModel m(slope, h);
      EXPECT_TRUE(same_entries(torus_spectrum(m, 0, 60.0), torus_spectrum(m, 2, 60.0)));
    }
  }
}

TEST(TorusSpectrum, DegreeOneBelowFirstLevelIsTheDoubleZero) {
  const TorusModel m(SlopeParam::Irrational(kSqrt2), 1.0);
  const auto s = torus_spectrum(m, 1, 1.0);
  ASSERT_EQ(s.entries().size(), 1u);
  EXPECT_EQ(s.entries()[0], (EigenvalueEntry{0.0, 2}));
}

TEST(TorusSpectrum, DegreeOneZeroMultiplicityIsTwoForIrrationalSlopes) {
  for (double h : {1.0, 0.1, 0.01}) {
    const auto s = torus_spectrum(TorusModel(SlopeParam::Irrational(kSqrt2), h), 1, 5.0);
    EXPECT_EQ(s.entries()[0], (EigenvalueEntry{0.0, 2})) << h;
  }
}

TEST(TorusSpectrum, InvalidArguments) {
  const TorusModel m(SlopeParam::Rational(0, 1), 1.0);
  EXPECT_THROW(torus_spectrum(m, 3, 10.0), PreconditionError);
  EXPECT_THROW(torus_spectrum(m, 0, std::nan("")), PreconditionError);
}

// The enumerator against a plain box scan twice as wide as its own radius.
TEST(TorusSpectrum, MatchesBruteForceOverDoubledBox) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> alpha(-3.0, 3.0);
  std::uniform_real_distribution<double> log_h(std::log(0.15), std::log(3.0));
  for (int draw = 0; draw < 20; ++draw) {
    const double a = alpha(rng);
    const double h = std::exp(log_h(rng));
    const TorusModel m(SlopeParam::Irrational(a), h);
    for (int degree : {0, 1}) {
      const double cutoff = degree == 0 ? 50.0 : 25.0;
      const auto box = static_cast<std::int64_t>(2.0 * torus_index_radius(m, cutoff)) + 2;
      const auto expected = degree == 0 ? oracle::torus_functions(a, h, cutoff, box)
                                        : oracle::torus_oneforms(a, h, cutoff, box);
      const auto s = torus_spectrum(m, degree, cutoff);
      ASSERT_LE(oracle::max_relative_gap(s.expanded(expected.size() + 1), expected), 1e-12)
          << "alpha=" << a << " h=" << h << " degree=" << degree;
    }
  }
}

TEST(TorusCount, Examples) {
  const TorusModel m(SlopeParam::Rational(0, 1), 0.01);
  EXPECT_EQ(torus_count_exact(m, 1.0, 0, CountMode::Open), 31);
  EXPECT_EQ(torus_count_exact(m, -1.0, 0, CountMode::Closed), 0);
  EXPECT_EQ(torus_count_exact(m, 0.0, 0, CountMode::Closed), 1);
  EXPECT_EQ(torus_count_exact(m, 0.0, 0, CountMode::Open), 0);
}

TEST(TorusCount, StreamingMatchesSlice) {
  for (const auto& slope : {SlopeParam::Irrational(kSqrt2), SlopeParam::Rational(1, 2)}) {
    for (int degree : {0, 1}) {
      const TorusModel m(slope, 0.2);
      const double top = degree == 0 ? 200.0 : 80.0;
      const auto s = torus_spectrum(m, degree, top);
      for (int i = 0; i < 100; ++i) {
        const double lambda = top * (i + 0.5) / 100.0;
        for (auto mode : {CountMode::Closed, CountMode::Open}) {
          ASSERT_EQ(torus_count_exact(m, lambda, degree, mode), count_below(s, lambda, mode))
              << slope.describe() << " degree " << degree << " lambda " << lambda;
        }
      }
      // Hit eigenvalues exactly so Open and Closed differ.
      for (const auto& e : s.entries()) {
        ASSERT_EQ(torus_count_exact(m, e.value, degree, CountMode::Open),
                  count_below(s, e.value, CountMode::Open));
        ASSERT_EQ(torus_count_exact(m, e.value, degree, CountMode::Closed),
                  count_below(s, e.value, CountMode::Closed));
      }
    }
  }
}

TEST(TorusCount, ThreadCountDoesNotChangeTheResult) {
  const TorusModel m(SlopeParam::Irrational(kSqrt2), 0.005);
  const auto serial = torus_count_exact(m, 10.0, 0, CountMode::Closed, 1);
  EXPECT_EQ(torus_count_exact(m, 10.0, 0, CountMode::Closed, 4), serial);
  EXPECT_EQ(torus_count_exact(m, 10.0, 0, CountMode::Closed, 7), serial);
}

TEST(TorusPredictedCount, Examples) {
  EXPECT_NEAR(torus_predicted_count(SlopeParam::Irrational(kSqrt2), 10.0, 0.01),
              1000.0 / (4.0 * kPi), 1e-10);
  EXPECT_NEAR(torus_predicted_count(SlopeParam::Rational(0, 1), 1.0, 0.01), 100.0 / kPi,
              1e-10);
  for (double h : {1.0, 0.1, 0.003}) {
    EXPECT_NEAR(torus_predicted_count(SlopeParam::Rational(1, 1), 1.0, h) * h,
                1.0 / (kPi * kSqrt2), 1e-14);
  }
  EXPECT_EQ(torus_predicted_count(SlopeParam::Rational(1, 1), -1.0, 0.1), 0.0);
  EXPECT_THROW(torus_predicted_count(SlopeParam::Rational(1, 1), 1.0, 0.0),
               PreconditionError);
}

TEST(TorusPredictedCount, RationalSlopesApproachTheIrrationalLaw) {
  const double lambda = 10.0;
  const double coefficient = torus_predicted_count(SlopeParam::Rational(201, 200), lambda, 1.0);
  EXPECT_NEAR(coefficient / (lambda / (4.0 * kPi)), 1.0, 0.02);
}

TEST(TorusLeafwiseSdf, IrrationalClosedForm) {
  const auto sdf = std::get<ContinuousSdf>(torus_leafwise_sdf(SlopeParam::Irrational(kSqrt2)));
  EXPECT_NEAR(sdf.value(kPi * kPi), 1.0, 1e-15);
  EXPECT_EQ(sdf.value(-1.0), 0.0);
}

TEST(TorusLeafwiseSdf, RationalJumps) {
  const auto gen = std::get<StepFunctionGenerator>(torus_leafwise_sdf(SlopeParam::Rational(0, 1)));
  const auto f = gen(50.0);
  ASSERT_EQ(f.jumps().size(), 2u);
  EXPECT_EQ(f.jumps()[0].location, 0.0);
  EXPECT_EQ(f.jumps()[0].size, 1.0);
  EXPECT_NEAR(f.jumps()[1].location, 4.0 * kPi * kPi, 1e-12);
  EXPECT_EQ(f.jumps()[1].size, 2.0);
  EXPECT_EQ(f(-1.0), 0.0);
}

TEST(TorusSource, EnvelopeDominatesCounts) {
  for (int degree : {0, 1}) {
    for (double h : {1.0, 0.2, 0.05}) {
      const TorusSource src(TorusModel(SlopeParam::Irrational(0.7), h), degree);
      const TorusModel m(SlopeParam::Irrational(0.7), h);
      for (double lambda : {0.0, 1.0, 10.0, 100.0, 400.0}) {
        EXPECT_LE(static_cast<double>(torus_count_exact(m, lambda, degree, CountMode::Closed)),
                  src.envelope()(lambda))
            << degree << " " << h << " " << lambda;
      }
    }
  }
}

}  // namespace
}  // namespace adiabatic
