#include "adiabatic/heisenberg.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "adiabatic/errors.hpp"
#include "oracles.hpp"

namespace adiabatic {
namespace {

constexpr double kPi = std::numbers::pi;

std::int64_t multiplicity_of(const SpectrumSlice& s, double value) {
  std::int64_t m = 0;
  for (const auto& e : s.entries()) {
    if (std::abs(e.value - value) <= 1e-12 * std::max(1.0, value)) m += e.multiplicity;
  }
  return m;
}

std::vector<double> all_of(const SpectrumSlice& s) {
  return s.expanded(static_cast<std::size_t>(s.total_multiplicity()));
}

TEST(HeisenbergMetric, Validation) {
  EXPECT_NO_THROW(HeisenbergMetric(1, 0.5, 1, 1));
  EXPECT_THROW(HeisenbergMetric(0, 0, 1, 1), PreconditionError);
  EXPECT_THROW(HeisenbergMetric(1, 1, 1, 1), PreconditionError);
  EXPECT_THROW(HeisenbergMetric(1, 0, 1, 0), PreconditionError);
  EXPECT_THROW(HeisenbergAdiabaticModel(0.0, 0.0), PreconditionError);
}

TEST(HeisenbergFunctions, IdentityMetricExamples) {
  const HeisenbergMetric g(1, 0, 1, 1);
  EXPECT_NEAR(heis_lattice_eigenvalue(g, 1, 0), 4 * kPi * kPi, 1e-12);
  EXPECT_NEAR(heis_landau_eigenvalue(g, 1, 0), 4 * kPi * kPi + 2 * kPi, 1e-12);
  const auto s = heis_function_spectrum(g, 50.0);
  EXPECT_TRUE(s.complete());
  EXPECT_EQ(s.entries()[0], (EigenvalueEntry{0.0, 1}));
  EXPECT_EQ(multiplicity_of(s, 4 * kPi * kPi), 4);
  EXPECT_EQ(multiplicity_of(s, 4 * kPi * kPi + 2 * kPi), 2);
}

TEST(HeisenbergFunctions, ZeroModeAlwaysPresent) {
  for (double h : {2.0, 1.0, 0.1}) {
    for (double alpha : {0.0, 0.4}) {
      const auto s = heis_form_spectrum(HeisenbergAdiabaticModel(h, alpha), 0, 1.0);
      ASSERT_FALSE(s.empty());
      EXPECT_EQ(s.entries()[0].value, 0.0);
    }
  }
}

TEST(HeisenbergFunctions, AdiabaticLandauLevel) {
  for (double h : {0.5, 0.1, 0.02}) {
    const auto g = heis_adiabatic_metric(HeisenbergAdiabaticModel(h, 0.0));
    const double expected = 2 * kPi * h + 4 * kPi * kPi * h * h;
    EXPECT_NEAR(heis_landau_eigenvalue(g, 1, 0), expected, 1e-13);
    const auto s = heis_function_spectrum(g, expected * 1.01);
    EXPECT_EQ(multiplicity_of(s, expected), 2) << h;
  }
}

TEST(HeisenbergOneForms, OriginValues) {
  for (double h : {1.0, 0.3}) {
    const auto g = heis_adiabatic_metric(HeisenbergAdiabaticModel(h, 0.0));
    const double G = g.g33() / (g.h11() * g.h22());
    EXPECT_EQ(heis_oneform_lattice_eigenvalue(g, 0, 0, Branch::Minus), 0.0);
    EXPECT_NEAR(heis_oneform_lattice_eigenvalue(g, 0, 0, Branch::Plus), G, 1e-15);
  }
  const HeisenbergMetric g(2.0, 0.0, 3.0, 5.0);
  EXPECT_NEAR(heis_oneform_lattice_eigenvalue(g, 0, 0, Branch::Plus), 5.0 / 6.0, 1e-15);
}

TEST(HeisenbergOneForms, SmallLatticeBranchClosedForm) {
  for (double h : {0.5, 0.1, 0.03}) {
    const auto g = heis_adiabatic_metric(HeisenbergAdiabaticModel(h, 0.0));
    const double x = 4 * kPi * kPi * h * h;
    const double textbook = x + (1 - std::sqrt(1 + 16 * kPi * kPi * h * h)) / 2;
    EXPECT_NEAR(heis_oneform_lattice_eigenvalue(g, 0, 1, Branch::Minus), textbook,
                1e-13 * std::max(textbook, 1e-3));
  }
}

// lambda_-(0, b) = x^2 - 2 x^3 + 5 x^4 - ... with x = 4 pi^2 b^2 h^2.
TEST(HeisenbergOneForms, TaylorExpansionOfSmallBranch) {
  for (int b = 1; b <= 3; ++b) {
    for (double h : {1e-2, 3e-3, 1e-3, 1e-4}) {
      const auto g = heis_adiabatic_metric(HeisenbergAdiabaticModel(h, 0.0));
      const double x = 4 * kPi * kPi * b * b * h * h;
      const double taylor = x * x - 2 * x * x * x + 5 * x * x * x * x;
      const double exact = heis_oneform_lattice_eigenvalue(g, 0, b, Branch::Minus);
      EXPECT_NEAR(exact / taylor, 1.0, std::max(20 * x * x * x, 1e-13)) << "b=" << b << " h=" << h;
    }
  }
}

TEST(HeisenbergOneForms, RequireDiagonalMetric) {
  const HeisenbergMetric g(1, 0.2, 1, 1);
  EXPECT_THROW(heis_oneform_spectrum(g, 10.0), PreconditionError);
  EXPECT_THROW(heis_form_spectrum(HeisenbergAdiabaticModel(0.5, 0.3), 1, 10.0),
               PreconditionError);
  EXPECT_THROW(heis_form_spectrum(HeisenbergAdiabaticModel(0.5, 0.0), 4, 10.0),
               PreconditionError);
}

TEST(AdiabaticMetric, Examples) {
  const auto id = heis_adiabatic_metric(HeisenbergAdiabaticModel(1.0, 0.0));
  EXPECT_EQ(id.h11(), 1.0);
  EXPECT_EQ(id.h12(), 0.0);
  EXPECT_EQ(id.h22(), 1.0);
  EXPECT_EQ(id.g33(), 1.0);
  const auto half = heis_adiabatic_metric(HeisenbergAdiabaticModel(0.5, 0.0));
  EXPECT_EQ(half.h11(), 1.0);
  EXPECT_EQ(half.h12(), 0.0);
  EXPECT_EQ(half.h22(), 4.0);
  EXPECT_EQ(half.g33(), 4.0);
}

TEST(AdiabaticMetric, LeafDeterminantIsInverseSquare) {
  for (double alpha : {-3.0, -0.7, 0.0, 0.1, 1.0, std::sqrt(2.0), 5.0}) {
    for (double h : {2.0, 1.0, 0.5, 0.1, 0.01}) {
      const auto g = heis_adiabatic_metric(HeisenbergAdiabaticModel(h, alpha));
      EXPECT_NEAR(g.det2() * h * h, 1.0, 1e-12) << alpha << " " << h;
    }
  }
}

// With a slanted flow the lattice family takes the torus shape.
TEST(AdiabaticMetric, SlantedLatticeFamilyHasTorusShape) {
  for (double alpha : {0.3, -1.2, 2.5}) {
    for (double h : {1.0, 0.4, 0.05}) {
      const auto g = heis_adiabatic_metric(HeisenbergAdiabaticModel(h, alpha));
      for (std::int64_t a = -3; a <= 3; ++a) {
        for (std::int64_t b = -3; b <= 3; ++b) {
          const double u = a + alpha * b;
          const double v = alpha * a - b;
          const double expected = 4 * kPi * kPi * (u * u + h * h * v * v) / (1 + alpha * alpha);
          const double got = heis_lattice_eigenvalue(g, a, b);
          EXPECT_NEAR(got, expected, 1e-12 * std::max(1.0, expected));
        }
      }
    }
  }
}

TEST(HeisenbergFormSpectrum, DegreeDualities) {
  for (double h : {1.0, 0.5, 0.1}) {
    const HeisenbergAdiabaticModel m(h, 0.0);
    const auto d0 = heis_form_spectrum(m, 0, 60.0);
    const auto d3 = heis_form_spectrum(m, 3, 60.0);
    EXPECT_TRUE(std::equal(d0.entries().begin(), d0.entries().end(), d3.entries().begin(),
                           d3.entries().end()));
    const auto d1 = heis_form_spectrum(m, 1, 60.0);
    const auto d2 = heis_form_spectrum(m, 2, 60.0);
    EXPECT_TRUE(std::equal(d1.entries().begin(), d1.entries().end(), d2.entries().begin(),
                           d2.entries().end()));
  }
}

TEST(HeisenbergFormSpectrum, OneFormZeroHasMultiplicityTwo) {
  for (double h : {1.0, 0.5, 0.1, 0.01}) {
    const auto s = heis_form_spectrum(HeisenbergAdiabaticModel(h, 0.0), 1, 1.0);
    EXPECT_EQ(s.entries()[0], (EigenvalueEntry{0.0, 2})) << h;
    EXPECT_GT(s.entries()[1].value, 0.0);
  }
}

TEST(HeisenbergFormSpectrum, UnitScaleIsTheIdentityMetric) {
  const auto a = heis_form_spectrum(HeisenbergAdiabaticModel(1.0, 0.0), 0, 100.0);
  const auto b = heis_function_spectrum(HeisenbergMetric(1, 0, 1, 1), 100.0);
  EXPECT_TRUE(std::equal(a.entries().begin(), a.entries().end(), b.entries().begin(),
                         b.entries().end()));
}

// For h <= 1 the first nonzero function eigenvalue is lambda(0, +-1) =
// 4 pi^2 h^2 itself; the bound is strict only for a, b both nonzero and for
// the Landau levels.
TEST(HeisenbergFormSpectrum, FunctionGap) {
  for (double h : {0.5, 0.1, 0.01}) {
    const double gap = 4 * kPi * kPi * h * h;
    const auto s = heis_form_spectrum(HeisenbergAdiabaticModel(h, 0.0), 0, 20.0);
    EXPECT_EQ(s.entries()[0], (EigenvalueEntry{0.0, 1}));
    EXPECT_NEAR(s.entries()[1].value, gap, 1e-14 * gap) << h;
    EXPECT_EQ(s.entries()[1].multiplicity, 2) << h;
    const auto g = heis_adiabatic_metric(HeisenbergAdiabaticModel(h, 0.0));
    for (std::int64_t a = -3; a <= 3; ++a) {
      for (std::int64_t b = -3; b <= 3; ++b) {
        if (a != 0 && b != 0) EXPECT_GT(heis_lattice_eigenvalue(g, a, b), gap);
      }
    }
    EXPECT_GT(heis_landau_eigenvalue(g, 1, 0), gap);
  }
}

// General formulas at the adiabatic metric against the closed forms of the
// diagonal model.
TEST(HeisenbergFormSpectrum, DiagonalClosedForms) {
  for (double h : {1.0, 0.5, 0.1}) {
    const HeisenbergAdiabaticModel m(h, 0.0);
    const auto f = all_of(heis_form_spectrum(m, 0, 100.0));
    EXPECT_LE(oracle::max_relative_gap(f, oracle::heis_diag_functions(h, 100.0)), 1e-12) << h;
    const auto o = all_of(heis_form_spectrum(m, 1, 100.0));
    EXPECT_LE(oracle::max_relative_gap(o, oracle::heis_diag_oneforms(h, 100.0)), 1e-12) << h;
  }
}

TEST(HeisenbergFormSpectrum, FunctionsMatchBruteForceOverDoubledBox) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.3, 2.0);
  std::uniform_real_distribution<double> shear(-0.9, 0.9);
  for (int draw = 0; draw < 20; ++draw) {
    const double h11 = u(rng);
    const double h22 = u(rng);
    const double h12 = shear(rng) * std::sqrt(h11 * h22);
    const double g33 = u(rng);
    const HeisenbergMetric g(h11, h12, h22, g33);
    const double cutoff = 50.0;
    const auto lb = heis_lattice_bounds(g, cutoff);
    const auto nb = heis_landau_bounds(g, cutoff);
    const auto expected = oracle::heis_functions(
        h11, h12, h22, g33, cutoff, 2 * static_cast<std::int64_t>(lb.radius) + 2,
        2 * nb.c_max + 1, 2 * nb.k_max + 1);
    const auto got = all_of(heis_function_spectrum(g, cutoff));
    ASSERT_LE(oracle::max_relative_gap(got, expected), 1e-12) << "draw " << draw;
  }
}

TEST(HeisenbergFormSpectrum, OneFormsMatchBruteForceOverDoubledBox) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.3, 2.0);
  for (int draw = 0; draw < 20; ++draw) {
    const double h11 = u(rng);
    const double h22 = u(rng);
    const double g33 = u(rng);
    const HeisenbergMetric g(h11, 0.0, h22, g33);
    const double cutoff = 50.0;
    const auto lb = heis_oneform_lattice_bounds(g, cutoff);
    const auto nb = heis_oneform_mixed_bounds(g, cutoff);
    const auto expected = oracle::heis_oneforms(
        h11, h22, g33, cutoff, 2 * static_cast<std::int64_t>(lb.radius) + 2,
        2 * nb.c_max + 1, 2 * nb.k_max + 1);
    const auto got = all_of(heis_oneform_spectrum(g, cutoff));
    // The oracle's textbook radicals lose digits on the small lambda_- values.
    ASSERT_EQ(got.size(), expected.size()) << "draw " << draw;
    for (std::size_t i = 0; i < got.size(); ++i) {
      ASSERT_NEAR(got[i], expected[i], 1e-12 * std::max(1.0, expected[i])) << i;
    }
  }
}

TEST(HeisenbergSource, EnvelopeDominatesCounts) {
  for (int degree : {0, 1}) {
    for (double h : {1.0, 0.3, 0.1}) {
      const HeisenbergSource src(HeisenbergAdiabaticModel(h, 0.0), degree);
      for (double lambda : {0.5, 1.0, 10.0, 100.0}) {
        const auto s = src.slice(lambda);
        EXPECT_LE(static_cast<double>(s.total_multiplicity()), src.envelope()(lambda));
      }
    }
  }
}

}  // namespace
}  // namespace adiabatic
