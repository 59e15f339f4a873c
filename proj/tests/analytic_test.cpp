#include <gtest/gtest.h>

#include <cmath>

#include "mzqfi/analytic.hpp"

namespace mzqfi {
namespace {

ModelParams at(double beta, double x, int n = 1, double hw = 1.0) { return {beta, hw, x, n}; }

// Naive textbook forms, used as independent oracles.
double naive_visibility(double beta, double hw) {
  const double e = std::exp(-beta * hw);
  return e / (2.0 + e);
}

double naive_p0(double beta, double x, int n, double hw) {
  const double v = naive_visibility(beta, hw);
  return (1.0 + v * std::cos(2.0 * n * x)) / (1.0 + v);
}

TEST(Visibility, InfiniteTemperatureIsOneThird) {
  EXPECT_NEAR(visibility(at(0.0, 0.0)), 1.0 / 3.0, 1e-15);
}

TEST(Visibility, Asymptotes) {
  EXPECT_NEAR(visibility(at(50.0, 0.0)), 0.0, 1e-12);
  EXPECT_NEAR(visibility(at(-50.0, 0.0)), 1.0, 1e-12);
  EXPECT_GT(visibility(at(800.0, 0.0)), -1e-300);
  EXPECT_LE(visibility(at(-800.0, 0.0)), 1.0);
  EXPECT_TRUE(std::isfinite(visibility(at(1e6, 0.0))));
}

TEST(Visibility, NegativeBetaValue) {
  EXPECT_NEAR(visibility(at(-4.0, 0.0)), 0.964663, 5e-7);
  EXPECT_NEAR(visibility(at(-4.0, 0.0)), naive_visibility(-4.0, 1.0), 1e-15);
}

TEST(Visibility, ComplementIsAccurateNearOne) {
  const auto vp = visibility_pair(-40.0, 1.0);
  EXPECT_NEAR(vp.one_minus_v / (2.0 * std::exp(-40.0)), 1.0, 1e-12);
}

TEST(VisibilityDerivative, AtZero) {
  EXPECT_NEAR(visibility_derivative(at(0.0, 0.0)), -2.0 / 9.0, 1e-15);
}

TEST(VisibilityDerivative, VanishesAtExtremes) {
  EXPECT_NEAR(visibility_derivative(at(50.0, 0.0)), 0.0, 1e-20);
  EXPECT_NEAR(visibility_derivative(at(-50.0, 0.0)), 0.0, 1e-20);
}

TEST(VisibilityDerivative, MatchesCentralDifference) {
  const double h = 1e-5;
  for (int i = 0; i <= 40; ++i) {
    const double b = -4.0 + 0.2 * i;
    const double fd = (visibility(at(b + h, 0)) - visibility(at(b - h, 0))) / (2 * h);
    EXPECT_NEAR(visibility_derivative(at(b, 0)), fd, 1e-8) << b;
    EXPECT_LT(visibility_derivative(at(b, 0)), 0.0);
  }
}

TEST(OutputProbabilities, GridRowExtremes) {
  EXPECT_NEAR(output_probabilities(at(-4.0, -M_PI / 2)).p0, 0.01799, 5e-6);
  EXPECT_NEAR(output_probabilities(at(0.0, M_PI / 2)).p0, 0.5, 1e-15);
  for (double b : {-3.0, 0.0, 2.0}) EXPECT_DOUBLE_EQ(output_probabilities(at(b, 0.0)).p0, 1.0);
}

TEST(OutputProbabilities, MatchesNaiveForm) {
  for (int n : {1, 3, 10})
    for (double b : {-4.0, -0.7, 0.0, 1.3, 4.0})
      for (double x : {-1.5, -0.3, 0.2, 1.1})
        EXPECT_NEAR(output_probabilities(at(b, x, n)).p0, naive_p0(b, x, n, 1.0), 1e-14);
}

TEST(OutputProbabilities, FringeExtremaForNegativeBeta) {
  const double b = -2.5;
  const double v = naive_visibility(b, 1.0);
  EXPECT_NEAR(output_probabilities(at(b, M_PI)).p0, 1.0, 1e-14);
  EXPECT_NEAR(output_probabilities(at(b, M_PI / 2)).p0, (1 - v) / (1 + v), 1e-14);
}

TEST(ProbabilityGradient, ZeroAtOrigin) {
  const auto g = probability_gradient(at(1.0, 0.0));
  EXPECT_EQ(g.d_beta, 0.0);
  EXPECT_EQ(g.d_x, 0.0);
}

TEST(ProbabilityGradient, KnownPoint) {
  EXPECT_NEAR(probability_gradient(at(0.0, M_PI / 4)).d_x, -0.5, 1e-15);
}

TEST(ProbabilityGradient, MatchesCentralDifferencesOnGrid) {
  const double h = 1e-6;
  const LandscapeGrid g;
  for (std::size_t i = 0; i < g.n_beta; ++i) {
    for (std::size_t j = 0; j < g.n_x; ++j) {
      const double b = g.beta_at(i), x = g.x_at(j);
      const auto gr = probability_gradient(at(b, x));
      const double db = (output_probabilities(at(b + h, x)).p0 - output_probabilities(at(b - h, x)).p0) / (2 * h);
      const double dx = (output_probabilities(at(b, x + h)).p0 - output_probabilities(at(b, x - h)).p0) / (2 * h);
      EXPECT_NEAR(gr.d_beta, db, 1e-8);
      EXPECT_NEAR(gr.d_x, dx, 1e-8);
    }
  }
}

TEST(FimAnalytic, QxxCeiling) {
  for (int n : {1, 5, 10}) {
    const auto f = fim_analytic(at(-50.0, 1e-6, n));
    EXPECT_NEAR(f.xx, 4.0 * n * n, 1e-4 * n * n) << n;
  }
}

TEST(FimAnalytic, InfiniteTemperatureQuadrature) {
  const auto f = fim_analytic(at(0.0, M_PI / 2));
  EXPECT_NEAR(f.bb, 0.25, 1e-15);
  EXPECT_NEAR(f.bx, 0.0, 1e-15);
}

TEST(FimAnalytic, EqualsTwoOutcomeFormula) {
  for (int n : {1, 2, 7}) {
    for (double b : {-4.0, -1.0, 0.3, 3.5}) {
      for (double x : {-1.2, -0.4, 0.1, 0.9}) {
        const auto p = at(b, x, n);
        const auto pr = output_probabilities(p);
        const auto g = probability_gradient(p);
        const double w = 1.0 / pr.p0 + 1.0 / pr.pN;
        const auto f = fim_analytic(p);
        EXPECT_NEAR(f.bb, g.d_beta * g.d_beta * w, 1e-12 * std::max(1.0, f.bb));
        EXPECT_NEAR(f.xx, g.d_x * g.d_x * w, 1e-12 * std::max(1.0, f.xx));
        EXPECT_NEAR(f.bx, g.d_beta * g.d_x * w, 1e-12 * std::max(1.0, std::abs(f.bx)));
      }
    }
  }
}

TEST(FimAnalytic, RankOne) {
  for (double b : {-4.0, 0.0, 2.0})
    for (double x : {-1.0, 0.3, 1.4}) {
      const auto f = fim_analytic(at(b, x, 3));
      EXPECT_NEAR(f.bx * f.bx, f.bb * f.xx, 1e-9);
    }
}

TEST(FimAnalytic, FiniteAtDarkFringeBelowUnitVisibility) {
  const auto f = fim_analytic(at(0.0, 0.0));
  EXPECT_NEAR(f.xx, 8.0 * (1.0 / 3.0) / (4.0 / 3.0), 1e-14);
  EXPECT_EQ(f.bb, 0.0);
}

TEST(FimAnalytic, DegenerateWhereClosedFormIsSingular) {
  // V = 1 to double precision and cos(2Nx) = -1.
  EXPECT_THROW(fim_analytic(at(-800.0, M_PI / 2)), DegenerateError);
  EXPECT_THROW(fim_analytic(at(0.0, 0.0, 0)), InvalidArgument);
  EXPECT_THROW(fim_analytic(ModelParams{0.0, -1.0, 0.0, 1}), InvalidArgument);
  EXPECT_THROW(fim_analytic(at(std::nan(""), 0.0)), InvalidArgument);
}

TEST(FimAnalytic, ThermometricScaleIndependentOfN) {
  // At matched phase Nx the beta-beta element does not depend on N.
  const double phase = 0.7;
  const double ref = fim_analytic(at(-1.0, phase, 1)).bb;
  for (int n : {2, 5, 9}) EXPECT_NEAR(fim_analytic(at(-1.0, phase / n, n)).bb, ref, 1e-14);
}

TEST(ScalarFigures, Examples) {
  auto s = scalar_figures({0.25, 0.0, 0.0});
  EXPECT_EQ(s.f_eff, 0.0);
  EXPECT_EQ(s.trace, 0.25);
  EXPECT_EQ(s.f_x_fraction, 0.0);
  s = scalar_figures({1.0, 3.0, 0.0});
  EXPECT_DOUBLE_EQ(s.f_eff, 0.75);
  EXPECT_DOUBLE_EQ(s.f_x_fraction, 0.75);
  EXPECT_NEAR(scalar_figures(fim_analytic(at(-1.0, 0.4))).f_eff, 0.0, 1e-9);
  EXPECT_THROW(scalar_figures({0.0, 0.0, 0.0}), DegenerateError);
}

TEST(PlateauMask, LimitsOfDelta) {
  const LandscapeGrid g;
  const auto all = plateau_mask(g, at(0, 0), 1.0 - 1e-12);
  for (auto m : all) EXPECT_EQ(m, 1);
  const auto top = plateau_mask(g, at(0, 0), 1e-12);
  int marked = 0;
  for (auto m : top) marked += m;
  EXPECT_GE(marked, 1);
  EXPECT_LE(marked, 4);  // symmetric copies of the argmax
  EXPECT_THROW(plateau_mask(g, at(0, 0), 0.0), InvalidArgument);
}

TEST(PlateauMask, DefaultPlateauSitsAtNegativeBeta) {
  const LandscapeGrid g;
  const auto mask = plateau_mask(g, at(0, 0), 0.05);
  int marked = 0;
  for (std::size_t i = 0; i < g.n_beta; ++i)
    for (std::size_t j = 0; j < g.n_x; ++j)
      if (mask(i, j)) {
        ++marked;
        EXPECT_LT(g.beta_at(i), 0.0);
      }
  EXPECT_GT(marked, 0);
}

TEST(ModelParams, Validation) {
  EXPECT_NO_THROW(at(-3.0, 0.1).validate());
  EXPECT_THROW(at(0.0, std::numeric_limits<double>::infinity()).validate(), InvalidArgument);
  LandscapeGrid g;
  g.n_x = 1;
  EXPECT_THROW(g.validate(), InvalidArgument);
  g = LandscapeGrid{};
  g.beta_range = {1.0, 1.0};
  EXPECT_THROW(g.validate(), InvalidArgument);
}

}  // namespace
}  // namespace mzqfi
