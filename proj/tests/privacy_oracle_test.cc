//
// Copyright 2026 The shuffledp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "shuffledp/privacy_oracle.h"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "shuffledp/bitsum.h"

namespace shuffledp {
namespace {

DiscretePMF PointMass(int size, int at) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(size);
  p[at] = 1;
  return *DiscretePMF::Create(p);
}

TEST(DiscretePmfTest, Validation) {
  EXPECT_FALSE(DiscretePMF::Create(Eigen::VectorXd()).ok());
  EXPECT_FALSE(DiscretePMF::Create(Eigen::Vector2d(0.5, 0.6)).ok());
  EXPECT_FALSE(DiscretePMF::Create(Eigen::Vector2d(1.5, -0.5)).ok());
  auto pmf = DiscretePMF::Create(Eigen::Vector3d(0.25, 0.5, 0.25));
  ASSERT_TRUE(pmf.ok());
  EXPECT_DOUBLE_EQ(pmf->Mean(), 1.0);
}

TEST(CLambdaPmfTest, NoRandomizationIsPointMass) {
  auto pmf = CLambdaPmf(3, 8, 0.0);
  ASSERT_TRUE(pmf.ok());
  for (int t = 0; t <= 8; ++t) EXPECT_EQ((*pmf)[t], t == 3 ? 1.0 : 0.0);
}

TEST(CLambdaPmfTest, FullRandomizationIsFairBinomial) {
  for (int k : {0, 4, 9}) {
    auto pmf = CLambdaPmf(k, 9, 9.0);
    ASSERT_TRUE(pmf.ok());
    for (int t = 0; t <= 9; ++t) {
      EXPECT_NEAR((*pmf)[t], std::tgamma(10) / std::tgamma(t + 1) /
                                 std::tgamma(10 - t) / 512.0,
                  1e-14);
    }
  }
}

TEST(CLambdaPmfTest, SmallExamples) {
  // n = 10, lambda = 5, k = 0: every output bit is 1 w.p. 0.25.
  EXPECT_NEAR((*CLambdaPmf(0, 10, 5.0))[0], 0.056313514709472656, 1e-15);
  const std::vector<double> expected = {0.10546875, 0.421875, 0.3515625,
                                        0.109375, 0.01171875};
  auto pmf = CLambdaPmf(1, 4, 2.0);
  ASSERT_TRUE(pmf.ok());
  for (int t = 0; t <= 4; ++t) EXPECT_NEAR((*pmf)[t], expected[t], 1e-15);
}

TEST(CLambdaPmfTest, MixtureMatchesProductRoute) {
  for (int n : {1, 5, 20, 60}) {
    for (double frac : {0.0, 0.1, 0.5, 0.9, 1.0}) {
      for (int k : {0, n / 3, n}) {
        const double lambda = frac * n;
        auto a = CLambdaPmf(k, n, lambda);
        auto b = ShuffledSumPmf(k, n, lambda);
        ASSERT_TRUE(a.ok() && b.ok());
        EXPECT_LT((a->probs() - b->probs()).cwiseAbs().maxCoeff(), 1e-12)
            << n << " " << lambda << " " << k;
      }
    }
  }
}

TEST(CLambdaPmfTest, NormalizedWithExpectedMean) {
  for (int n : {10, 50, 200}) {
    for (double frac : {0.05, 0.3, 0.75}) {
      for (int k : {0, n / 2, n}) {
        const double lambda = frac * n;
        for (auto pmf : {CLambdaPmf(k, n, lambda), ShuffledSumPmf(k, n, lambda)}) {
          ASSERT_TRUE(pmf.ok());
          EXPECT_NEAR(pmf->probs().sum(), 1.0, 1e-10);
          EXPECT_GE(pmf->probs().minCoeff(), 0.0);
          // E[sum] = k (1 - lambda/n) + lambda/2.
          EXPECT_NEAR(pmf->Mean(), k * (1 - lambda / n) + lambda / 2, 1e-8);
        }
      }
    }
  }
}

TEST(CLambdaPmfTest, Errors) {
  EXPECT_FALSE(CLambdaPmf(5, 4, 1.0).ok());
  EXPECT_FALSE(CLambdaPmf(-1, 4, 1.0).ok());
  EXPECT_FALSE(CLambdaPmf(1, 4, 5.0).ok());
  EXPECT_FALSE(ShuffledSumPmf(1, 4, -1.0).ok());
}

TEST(HockeyStickTest, Examples) {
  const DiscretePMF p = *DiscretePMF::Create(Eigen::Vector2d(0.5, 0.5));
  const DiscretePMF q = *DiscretePMF::Create(Eigen::Vector2d(0.75, 0.25));
  EXPECT_DOUBLE_EQ(*HockeyStick(p, p, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(*HockeyStick(p, p, 2.0), 0.0);
  EXPECT_DOUBLE_EQ(*HockeyStick(p, q, 0.0), 0.25);
  EXPECT_DOUBLE_EQ(*HockeyStick(p, q, std::log(2.0)), 0.0);
  EXPECT_DOUBLE_EQ(*HockeyStick(PointMass(2, 0), PointMass(2, 1), 0.0), 1.0);
  EXPECT_DOUBLE_EQ(*HockeyStick(PointMass(2, 0), PointMass(2, 1), 30.0), 1.0);
  EXPECT_FALSE(HockeyStick(p, PointMass(3, 0), 0.0).ok());
  EXPECT_FALSE(HockeyStick(p, q, std::nan("")).ok());
}

TEST(VerifyShuffledDpTest, Edges) {
  auto full = VerifyShuffledDp(30, 30.0, {0.0, 1e-9});
  ASSERT_TRUE(full.ok());
  EXPECT_NEAR(full->delta_measured, 0.0, 1e-12);
  EXPECT_TRUE(full->pass);

  auto none = VerifyShuffledDp(30, 0.0, {5.0, 1e-6});
  ASSERT_TRUE(none.ok());
  EXPECT_DOUBLE_EQ(none->delta_measured, 1.0);
  EXPECT_FALSE(none->pass);
}

TEST(VerifyShuffledDpTest, ExactDeltaReferenceValues) {
  auto a = VerifyShuffledDp(20, 10.0, {0.5, 0.0075});
  ASSERT_TRUE(a.ok());
  EXPECT_NEAR(a->delta_measured, 0.0075213764248920812, 1e-13);
  EXPECT_FALSE(a->pass);
  auto b = VerifyShuffledDp(30, 6.0, {1.0, 0.031});
  ASSERT_TRUE(b.ok());
  EXPECT_NEAR(b->delta_measured, 0.030822961018673673, 1e-13);
  EXPECT_TRUE(b->pass);
  VerifyOptions mixture;
  mixture.route = PmfRoute::kMixture;
  auto c = VerifyShuffledDp(30, 6.0, {1.0, 0.031}, mixture);
  ASSERT_TRUE(c.ok());
  EXPECT_NEAR(c->delta_measured, b->delta_measured, 1e-12);
}

TEST(VerifyShuffledDpTest, ProvableEpsilonPasses) {
  const double delta = 0.01;
  for (std::int64_t n : {100, 400}) {
    const double lambda = 0.5 * static_cast<double>(n);
    if (lambda < MinProvableLambda(delta)) continue;
    const double eps = *EpsilonOfLambda(n, lambda, delta);
    auto report = VerifyShuffledDp(n, lambda, {eps, delta});
    ASSERT_TRUE(report.ok());
    EXPECT_TRUE(report->pass) << n << " " << report->delta_measured;
  }
}

TEST(VerifyShuffledDpTest, Guards) {
  EXPECT_EQ(VerifyShuffledDp(2001, 100.0, {1.0, 1e-6}).status().code(),
            absl::StatusCode::kResourceExhausted);
  EXPECT_FALSE(VerifyShuffledDp(100, 100.5, {1.0, 1e-6}).ok());
  EXPECT_FALSE(VerifyShuffledDp(100, 10.0, {-1.0, 1e-6}).ok());
}

TEST(TightEpsilonTest, ConsistentWithVerify) {
  auto eps = TightEpsilon(60, 20.0, 1e-3);
  ASSERT_TRUE(eps.ok());
  EXPECT_GT(*eps, 0);
  EXPECT_TRUE(VerifyShuffledDp(60, 20.0, {*eps * 1.001, 1e-3})->pass);
  EXPECT_FALSE(VerifyShuffledDp(60, 20.0, {*eps * 0.99, 1e-3})->pass);
}

TEST(VerifyRandomizerLocalDpTest, Examples) {
  auto r = VerifyRandomizerLocalDp(10, 9.0, 0.2007);
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(*r->eps_measured, 0.20067069546215116, 1e-14);
  EXPECT_TRUE(r->pass);
  EXPECT_FALSE(VerifyRandomizerLocalDp(10, 9.0, 0.2006)->pass);
  EXPECT_NEAR(*VerifyRandomizerLocalDp(10, 10.0, 0.0)->eps_measured, 0.0,
              1e-15);
  auto none = VerifyRandomizerLocalDp(10, 0.0, 100.0);
  ASSERT_TRUE(none.ok());
  EXPECT_FALSE(none->pass);
  EXPECT_TRUE(std::isinf(*none->eps_measured));
}

TEST(VerifyRandomizerLocalDpTest, WithinRemovalBoundAtClosedForm) {
  const double lambda = *LambdaClosedForm(10000, {1.0, 1e-6});
  auto r = VerifyRandomizerLocalDp(10000, lambda, 1.0 + std::log(10000.0));
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(*r->eps_measured, std::log(2e4 / lambda - 1), 1e-12);
  EXPECT_NEAR(*r->eps_measured, 2.97, 0.01);
  EXPECT_TRUE(r->pass);
}

TEST(VerifyBinaryRandomizerLocalDpTest, RatioCheck) {
  const double p = std::exp(1.0) / (std::exp(1.0) + 1);
  EXPECT_TRUE(VerifyBinaryRandomizerLocalDp(p, 1 - p, 1.0 + 1e-12).pass);
  EXPECT_FALSE(VerifyBinaryRandomizerLocalDp(p, 1 - p, 1.0 - 1e-9).pass);
}

TEST(ChiSquareTest, PerfectFitAndMismatch) {
  const DiscretePMF pmf = *DiscretePMF::Create(Eigen::Vector3d(0.25, 0.5, 0.25));
  const std::vector<std::int64_t> good = {2500, 5000, 2500};
  auto fit = ChiSquareGoodnessOfFit(good, pmf);
  ASSERT_TRUE(fit.ok());
  EXPECT_DOUBLE_EQ(fit->statistic, 0.0);
  EXPECT_EQ(fit->degrees_of_freedom, 2);
  EXPECT_DOUBLE_EQ(fit->p_value, 1.0);
  const std::vector<std::int64_t> bad = {3000, 4500, 2500};
  auto misfit = ChiSquareGoodnessOfFit(bad, pmf);
  ASSERT_TRUE(misfit.ok());
  // (500^2/2500) + (500^2/5000) = 150 with 2 dof.
  EXPECT_NEAR(misfit->statistic, 150.0, 1e-9);
  EXPECT_NEAR(misfit->p_value, std::exp(-75.0), 1e-40);
}

TEST(EmpiricalEquivalenceTest, DegenerateAndCalibrated) {
  auto degenerate = EmpiricalEquivalenceTest(10, 0.0, 4, 100000, RandomSource(1));
  ASSERT_TRUE(degenerate.ok());
  EXPECT_GT(degenerate->p_value, 1e-3);

  auto pass = EmpiricalEquivalenceTest(20, 10.0, 7, 1000000, RandomSource(2));
  ASSERT_TRUE(pass.ok());
  EXPECT_GT(pass->p_value, 1e-3);

  auto negative =
      EmpiricalEquivalenceTest(20, 10.0, 7, 1000000, RandomSource(2), 8);
  ASSERT_TRUE(negative.ok());
  EXPECT_LT(negative->p_value, 1e-6);

  EXPECT_FALSE(EmpiricalEquivalenceTest(20, 10.0, 7, 1000, RandomSource(2)).ok());
}

TEST(PmfSamplerTest, MatchesPmf) {
  const DiscretePMF pmf = *ShuffledSumPmf(5, 12, 6.0);
  const PmfSampler sampler(pmf);
  RandomSource rng(3);
  std::vector<std::int64_t> counts(13, 0);
  for (int i = 0; i < 200000; ++i) ++counts[sampler(rng)];
  auto fit = ChiSquareGoodnessOfFit(counts, pmf);
  ASSERT_TRUE(fit.ok());
  EXPECT_GT(fit->p_value, 1e-4);
}

TEST(HockeyStickTest, NonincreasingInEps) {
  const DiscretePMF p = *ShuffledSumPmf(3, 12, 4.0);
  const DiscretePMF q = *ShuffledSumPmf(4, 12, 4.0);
  double prev = 2;
  for (double eps = 0; eps < 5; eps += 0.1) {
    const double d = *HockeyStick(p, q, eps);
    EXPECT_LE(d, prev);
    prev = d;
  }
}

TEST(VerifyShuffledDpTest, LambdaStarPassesOnGrid) {
  constexpr double kDeltaSmall = 1e-6;
  for (std::int64_t n : {50, 100, 200, 500}) {
    for (double eps : {0.5, 1.0, 2.0}) {
      auto lambda = LambdaStar(n, {eps, kDeltaSmall});
      if (static_cast<double>(n) < MinProvableLambda(kDeltaSmall)) {
        EXPECT_FALSE(lambda.ok());
        continue;
      }
      if (!lambda.ok()) continue;
      auto report = VerifyShuffledDp(n, *lambda, {eps, kDeltaSmall});
      ASSERT_TRUE(report.ok());
      EXPECT_TRUE(report->pass) << n << " " << eps;
    }
  }
  // Larger delta, where every size has a provable lambda.
  for (std::int64_t n : {50, 100, 200, 500}) {
    auto lambda = LambdaStar(n, {1.0, 0.2});
    ASSERT_TRUE(lambda.ok()) << lambda.status();
    EXPECT_TRUE(VerifyShuffledDp(n, *lambda, {1.0, 0.2})->pass) << n;
  }
}

TEST(VerifyShuffledDpTest, WorstPairIsAdjacent) {
  auto report = VerifyShuffledDp(40, 8.0, {0.3, 1e-6});
  ASSERT_TRUE(report.ok());
  EXPECT_EQ(std::abs(report->worst_pair.from_k - report->worst_pair.to_k), 1);
}

TEST(EmpiricalEquivalenceTest, LayoutOfOnesDoesNotMatter) {
  // Different seeds place the k ones at different positions.
  for (std::uint64_t seed : {10, 11, 12}) {
    auto fit = EmpiricalEquivalenceTest(15, 6.0, 5, 200000, RandomSource(seed));
    ASSERT_TRUE(fit.ok());
    EXPECT_GT(fit->p_value, 1e-3) << seed;
  }
}

}  // namespace
}  // namespace shuffledp
