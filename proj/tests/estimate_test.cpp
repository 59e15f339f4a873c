#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mzqfi/estimate.hpp"

namespace mzqfi {
namespace {

ShotRecord record(std::int64_t n0, std::int64_t mu, double beta = 0.0, double x = 0.0) {
  ShotRecord r;
  r.n0 = n0;
  r.n1 = mu - n0;
  r.mu = mu;
  r.beta = beta;
  r.x = x;
  return r;
}

TEST(EmpiricalProbability, Examples) {
  EXPECT_EQ(empirical_probability(record(10, 10)), 1.0);
  EXPECT_EQ(empirical_probability(record(0, 10)), 0.0);
  EXPECT_DOUBLE_EQ(empirical_probability(record(9620, 10000)), 0.962);
  EXPECT_THROW(empirical_probability(record(0, 0)), InvalidArgument);
  EXPECT_THROW(empirical_probability(record(11, 10)), InvalidArgument);
}

TEST(EmpiricalFim, MatchesAnalyticAtExactProbability) {
  // At beta = 0, x = pi/4 the fringe sits at P0 = 1/(1 + V) = 3/4.
  const ModelParams p{0.0, 1.0, M_PI / 4, 1};
  ASSERT_DOUBLE_EQ(output_probabilities(p).p0, 0.75);
  const auto e = empirical_fim(record(3, 4), p);
  const auto a = fim_analytic(p);
  EXPECT_NEAR(e.bb, a.bb, 1e-15);
  EXPECT_NEAR(e.xx, a.xx, 1e-15);
  EXPECT_NEAR(e.bx, a.bx, 1e-15);
}

TEST(EmpiricalFim, ZeroGradientAndDegenerateCounts) {
  const auto z = empirical_fim(record(10, 10), ModelParams{0.3, 1.0, 0.0, 1});
  EXPECT_EQ(z.bb, 0.0);
  EXPECT_EQ(z.xx, 0.0);
  EXPECT_EQ(z.bx, 0.0);
  EXPECT_THROW(empirical_fim(record(10, 10), ModelParams{0.3, 1.0, 0.4, 1}), DegenerateError);
  EXPECT_THROW(empirical_fim(record(0, 10), ModelParams{0.3, 1.0, 0.4, 1}), DegenerateError);
}

TEST(EmpiricalFim, SampledSpreadTracksBinomialPropagation) {
  // RMS relative deviation of f_xx over 200 seeds against the delta-method
  // prediction |d f / d P0| sigma_P / f.
  const double beta = 0.5, x = 0.6;
  const std::int64_t mu = 10000;
  const ModelParams p{beta, 1.0, x, 1};
  const double p0 = output_probabilities(p).p0;
  const auto a = fim_analytic(p);
  const double sigma_p = std::sqrt(p0 * (1 - p0) / mu);
  const double predicted = std::abs(1 - 2 * p0) / (p0 * (1 - p0)) * sigma_p;
  double ss = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto rec = sample_shots(beta, x, mu, seed);
    const auto e = empirical_fim(rec, p);
    ss += std::pow((e.xx - a.xx) / a.xx, 2);
  }
  const double rms = std::sqrt(ss / 200);
  EXPECT_LT(rms, 5 * predicted);
  EXPECT_GT(rms, 0.2 * predicted);
}

TEST(FitFringe, RecoversNoiselessVisibility) {
  std::vector<double> xs, ps;
  for (int i = 0; i < 20; ++i) {
    const double x = -M_PI / 2 + M_PI * i / 19.0;
    xs.push_back(x);
    ps.push_back(output_probabilities({0.0, 1.0, x, 1}).p0);
  }
  const auto f = fit_fringe(xs, ps, 1);
  EXPECT_NEAR(f.v_meas, 1.0 / 3.0, 1e-10);
  EXPECT_NEAR(f.offset, 0.75, 1e-12);
  EXPECT_LT(f.residual, 1e-12);
  EXPECT_FALSE(f.out_of_model);
}

TEST(FitFringe, ConstantAndShrunkSamples) {
  std::vector<double> xs, ones, shrunk;
  const ShrinkageModel m{0.5};
  const double v = apply_shrinkage(visibility({-4.0, 1.0, 0.0, 1}), m);
  for (int i = 0; i < 15; ++i) {
    const double x = -M_PI / 2 + M_PI * i / 14.0;
    xs.push_back(x);
    ones.push_back(1.0);
    shrunk.push_back((1 + v * std::cos(2 * x)) / (1 + v));
  }
  const auto c = fit_fringe(xs, ones, 1);
  EXPECT_NEAR(c.amplitude, 0.0, 1e-14);
  EXPECT_NEAR(c.v_meas, 0.0, 1e-14);
  EXPECT_NEAR(fit_fringe(xs, shrunk, 1).v_meas, 0.64900, 1e-5);
}

TEST(FitFringe, Preconditions) {
  EXPECT_THROW(fit_fringe({0.0, 0.1}, {0.5, 0.5}, 1), InvalidArgument);
  EXPECT_THROW(fit_fringe({0.0, 0.1, 0.2}, {0.5, 0.5, 0.5}, 1), InvalidArgument);
  // Half a period of cos(2Nx) at N = 1 is x in [0, pi/2]; sampling there at
  // the same cosine value leaves no design.
  EXPECT_THROW(fit_fringe({0.0, M_PI, 2 * M_PI}, {0.5, 0.5, 0.5}, 1), DegenerateError);
}

TEST(InvertVisibility, Examples) {
  EXPECT_NEAR(invert_visibility(1.0 / 3.0), 0.0, 1e-15);
  EXPECT_NEAR(invert_visibility(0.964663), -4.0, 1e-5);
  EXPECT_NEAR(invert_visibility(visibility({-4.0, 1.0, 0.0, 1})), -4.0, 1e-12);
  EXPECT_NEAR(invert_visibility(0.64900), -1.3083, 1e-3);
  EXPECT_THROW(invert_visibility(0.0), OutOfDomainError);
  EXPECT_THROW(invert_visibility(1.0), OutOfDomainError);
  EXPECT_NEAR(invert_visibility(visibility({2.0, 0.5, 0.0, 1}), 0.5), 2.0, 1e-12);
}

TEST(EstimateX, Examples) {
  EXPECT_EQ(estimate_x(1.0, 0.5, 1).x_hat, 0.0);
  const ModelParams p{-4.0, 1.0, -M_PI / 2, 1};
  const double p0 = output_probabilities(p).p0;
  EXPECT_NEAR(p0, 0.01799, 1e-5);
  const auto e = estimate_x(p0, visibility(p), 1, -1.0);
  EXPECT_NEAR(e.x_hat, -M_PI / 2, 1e-6);
  const auto c = estimate_x(1.0 + 1e-3, 0.5, 1);
  EXPECT_TRUE(c.clamped);
  EXPECT_EQ(c.x_hat, 0.0);
  EXPECT_THROW(estimate_x(0.5, 0.0, 1), DegenerateError);
}

TEST(EstimateX, InvertsFringeOnPrincipalBranch) {
  for (int n : {1, 3}) {
    for (double x : {0.05, 0.2, 0.45}) {
      const double xx = x / n;
      const ModelParams p{0.7, 1.0, xx, n};
      EXPECT_NEAR(estimate_x(output_probabilities(p).p0, visibility(p), n).x_hat, xx, 1e-9);
    }
  }
}

TEST(Shrinkage, Examples) {
  EXPECT_DOUBLE_EQ(apply_shrinkage(0.8, ShrinkageModel{1.0}), 0.8);
  for (double k : {0.1, 0.5, 0.9}) EXPECT_DOUBLE_EQ(apply_shrinkage(1.0 / 3.0, ShrinkageModel{k}), 1.0 / 3.0);
  EXPECT_NEAR(apply_shrinkage(0.964663, ShrinkageModel{0.5}), 0.64900, 5e-6);
  EXPECT_THROW(apply_shrinkage(0.5, ShrinkageModel{0.0}), InvalidArgument);
  EXPECT_THROW(apply_shrinkage(0.5, ShrinkageModel{1.5}), InvalidArgument);
}

TEST(CorrectShrinkage, Examples) {
  const ShrinkageModel m{0.5};
  const double vm = apply_shrinkage(visibility({-4.0, 1.0, 0.0, 1}), m);
  EXPECT_NEAR(correct_shrinkage(vm, m), -4.0, 1e-9);
  for (double k : {0.2, 0.7}) EXPECT_NEAR(correct_shrinkage(1.0 / 3.0, ShrinkageModel{k}), 0.0, 1e-12);
  EXPECT_THROW(correct_shrinkage(0.99, ShrinkageModel{0.1}), OutOfDomainError);
}

TEST(Bootstrap, RelativeSpreadAndDeterminism) {
  // Away from P0 = 1/2, where the first-order spread of f_xx vanishes.
  const double beta = 0.5, x = 0.6;
  const ModelParams p{beta, 1.0, x, 1};
  const auto rec = sample_shots(beta, x, 10000, 7);
  const auto a = bootstrap_fim(rec, p, 200, 99);
  const auto b = bootstrap_fim(rec, p, 200, 99);
  EXPECT_EQ(a.mean.xx, b.mean.xx);
  EXPECT_EQ(a.std.xx, b.std.xx);
  EXPECT_EQ(a.used, 200);
  const double rel = a.std.xx / a.mean.xx;
  EXPECT_GT(rel, 0.2 / 100.0);
  EXPECT_LT(rel, 5.0 / 100.0);

  const auto big = sample_shots(beta, x, 100000000, 7);
  const double rel_big = bootstrap_fim(big, p, 200, 99).std.xx / bootstrap_fim(big, p, 200, 99).mean.xx;
  EXPECT_NEAR(rel / rel_big, 100.0, 30.0);
  EXPECT_THROW(bootstrap_fim(rec, p, 50, 1), InvalidArgument);
}

TEST(Bootstrap, TooManyDegenerateResamples) {
  const ModelParams p{0.0, 1.0, 0.4, 1};
  EXPECT_THROW(bootstrap_fim(record(1, 20), p, 200, 3), DegenerateError);
}

TEST(BiasSweep, ContractionAndRecovery) {
  const auto rows = bias_sweep({-4, -2, 0, 2, 4}, 0.5);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.contracted) << r.beta_true;
    EXPECT_TRUE(r.in_domain);
    EXPECT_NEAR(r.beta_corr, r.beta_true, 1e-9);
  }
  EXPECT_NEAR(rows[0].beta_hat, -1.3083, 1e-3);
  EXPECT_NEAR(rows[2].beta_hat, 0.0, 1e-15);
  const auto near_identity = bias_sweep({-4, 3}, 1.0 - 1e-9);
  EXPECT_NEAR(near_identity[0].beta_hat, -4.0, 1e-6);
  EXPECT_NEAR(near_identity[1].beta_hat, 3.0, 1e-6);
}

}  // namespace
}  // namespace mzqfi
