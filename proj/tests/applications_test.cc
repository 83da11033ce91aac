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

#include "shuffledp/applications.h"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "shuffledp/bitsum.h"
#include "shuffledp/privacy_oracle.h"

namespace shuffledp {
namespace {

constexpr PrivacyBudget kBudget{1.0, 1e-6};

BinaryMatrixDataset Matrix(std::int64_t n, int d,
                           const std::vector<std::int64_t>& ones_per_column) {
  BitMatrix m = BitMatrix::Zero(n, d);
  for (int j = 0; j < d; ++j) {
    for (std::int64_t i = 0; i < ones_per_column[j]; ++i) m(i, j) = 1;
  }
  return *BinaryMatrixDataset::Create(std::move(m));
}

TEST(HistogramTest, NoNoiseAllZeros) {
  auto data = CategoricalDataset::Create(std::vector<int>(50, 0), 2);
  ASSERT_TRUE(data.ok());
  auto v = HistogramProtocol(*data, kBudget, RandomSource(1),
                             HistogramOptions{0.0});
  ASSERT_TRUE(v.ok()) << v.status();
  EXPECT_EQ(*v, Eigen::Vector2d(50, 0));
}

TEST(HistogramTest, OneHotDiffersInTwoCoordinates) {
  const HistogramRandomizer r({10, 5, 0.0});
  std::vector<TaggedBit> a, b;
  RandomSource rng(2);
  r.Randomize(1, rng, a);
  r.Randomize(3, rng, b);
  ASSERT_EQ(a.size(), 5u);
  int differ = 0;
  for (int j = 0; j < 5; ++j) differ += a[j].bit != b[j].bit;
  EXPECT_EQ(differ, 2);
}

TEST(HistogramTest, EstimatesClampedAndLambdaHalvesBudget) {
  std::vector<int> values(400);
  for (int i = 0; i < 400; ++i) values[i] = i % 4;
  auto data = CategoricalDataset::Create(values, 4);
  auto v = HistogramProtocol(*data, kBudget, RandomSource(3),
                             HistogramOptions{300.0});
  ASSERT_TRUE(v.ok());
  EXPECT_GE(v->minCoeff(), 0.0);
  EXPECT_LE(v->maxCoeff(), 400.0);
  EXPECT_NEAR(*HistogramLambda(10000, kBudget),
              *LambdaStar(10000, {0.5, 0.5e-6}), 1e-12);
}

TEST(HistogramTest, InfeasibleBudget) {
  auto data = CategoricalDataset::Create(std::vector<int>(10, 0), 2);
  EXPECT_FALSE(HistogramProtocol(*data, {0.001, 1e-6}, RandomSource(1)).ok());
}

TEST(CheckHistogramTest, Boundaries) {
  std::vector<int> values(100);
  for (int i = 0; i < 100; ++i) values[i] = i % 5 == 0;
  const CategoricalDataset data = *CategoricalDataset::Create(values, 3);
  const Eigen::VectorXd exact = data.Histogram();
  EXPECT_TRUE(CheckHistogram(data, exact));
  Eigen::VectorXd edge = exact;
  edge[2] += 10;
  EXPECT_TRUE(CheckHistogram(data, edge));
  edge[2] += 1e-9;
  EXPECT_FALSE(CheckHistogram(data, edge));
  Eigen::VectorXd far = exact;
  far[0] += 100;
  EXPECT_FALSE(CheckHistogram(data, far));
  EXPECT_FALSE(CheckHistogram(data, Eigen::Vector2d(80, 20)));
}

TEST(SelectionTest, SingleColumnAlwaysZero) {
  const BinaryMatrixDataset data = Matrix(1000, 1, {300});
  for (int s = 0; s < 5; ++s) {
    auto j = SelectionProtocol(data, kBudget, RandomSource(s));
    ASSERT_TRUE(j.ok()) << j.status();
    EXPECT_EQ(*j, 0);
  }
}

TEST(SelectionTest, NoNoiseIsExactArgmax) {
  const BinaryMatrixDataset data = Matrix(50, 4, {10, 30, 30, 5});
  auto j = SelectionProtocol(data, kBudget, RandomSource(1),
                             SelectionOptions{0.0});
  ASSERT_TRUE(j.ok());
  EXPECT_EQ(*j, 1);
}

TEST(SelectionTest, PlanComposesWithinBudget) {
  auto plan = PlanSelection(50000, 16, kBudget);
  ASSERT_TRUE(plan.ok()) << plan.status();
  auto total = Compose(plan->round_budget.eps0, plan->round_budget.delta0, 16,
                       plan->round_budget.delta_prime);
  EXPECT_LE(total->eps, 1.0);
  EXPECT_LE(total->delta, 1e-6);
  EXPECT_LE(*EpsilonOfLambda(50000, plan->lambda, plan->round_budget.delta0),
            plan->round_budget.eps0);
}

TEST(ArgMaxLowestIndexTest, Ties) {
  EXPECT_EQ(ArgMaxLowestIndex(Eigen::Vector3d(1, 3, 3)), 1);
  EXPECT_EQ(ArgMaxLowestIndex(Eigen::Vector3d(2, 2, 2)), 0);
  EXPECT_EQ(ArgMaxLowestIndex(Eigen::Vector3d(-1, -5, 0)), 2);
}

TEST(CheckSelectionTest, Boundaries) {
  EXPECT_TRUE(CheckSelection(Matrix(10, 1, {4}), 0));
  const BinaryMatrixDataset equal = Matrix(10, 3, {5, 5, 5});
  for (int j = 0; j < 3; ++j) EXPECT_TRUE(CheckSelection(equal, j));
  // Margin of exactly n/10 between the planted column and the rest.
  const BinaryMatrixDataset planted = Matrix(100, 3, {30, 40, 30});
  EXPECT_TRUE(CheckSelection(planted, 0));
  EXPECT_TRUE(CheckSelection(planted, 1));
  const BinaryMatrixDataset wide = Matrix(100, 2, {29, 40});
  EXPECT_FALSE(CheckSelection(wide, 0));
  EXPECT_FALSE(CheckSelection(wide, 2));
  EXPECT_FALSE(CheckSelection(wide, -1));
}

TEST(LocalBaselineTest, InfiniteEpsilonIsExact) {
  std::vector<Bit> bits(300);
  for (int i = 0; i < 300; ++i) bits[i] = i % 7 < 3;
  const BitDataset data = *BitDataset::Create(bits);
  auto est = LocalBaselineBitSum(
      data, std::numeric_limits<double>::infinity(), RandomSource(1));
  ASSERT_TRUE(est.ok());
  EXPECT_EQ(*est, static_cast<double>(data.Sum()));
  EXPECT_FALSE(LocalBaselineBitSum(data, 0.0, RandomSource(1)).ok());
}

TEST(LocalBaselineTest, LikelihoodRatioIsExpEps) {
  for (double eps : {0.1, 1.0, 3.0}) {
    const double keep = RandomizedResponseKeepProbability(eps);
    EXPECT_NEAR(std::log(keep / (1 - keep)), eps, 1e-12);
    const DPReport r = VerifyBinaryRandomizerLocalDp(keep, 1 - keep, eps + 1e-12);
    EXPECT_TRUE(r.pass);
  }
}

TEST(LocalBaselineTest, Unbiased) {
  std::vector<Bit> bits(2000);
  for (int i = 0; i < 2000; ++i) bits[i] = i % 3 == 0;
  const BitDataset data = *BitDataset::Create(bits);
  const RandomSource root(4);
  constexpr int kTrials = 5000;
  double sum = 0, sq = 0;
  for (int t = 0; t < kTrials; ++t) {
    const double e = *LocalBaselineBitSum(data, 1.0, root.Stream(t));
    sum += e;
    sq += e * e;
  }
  const double mean = sum / kTrials;
  const double se = std::sqrt((sq / kTrials - mean * mean) / kTrials);
  EXPECT_NEAR(mean, static_cast<double>(data.Sum()), 4 * se);
}

TEST(ShuffledToLocalTest, MatchesShuffledProtocolExactly) {
  const BitSumParams params{800, 90.0};
  std::vector<Bit> bits(800);
  for (int i = 0; i < 800; ++i) bits[i] = i % 5 < 2;
  auto local = ShuffledToLocal(BitSumRandomizer(params), BitSumAnalyzer(params));
  ASSERT_TRUE(local.ok()) << local.status();
  const RandomSource root(6);
  double shuffled_err = 0, local_err = 0;
  for (int t = 0; t < 10000; ++t) {
    const RandomSource rng = root.Stream(t);
    auto s = RunProtocol(BitSumRandomizer(params), BitSumAnalyzer(params), bits,
                         rng);
    auto l = local->Run(bits, rng);
    ASSERT_TRUE(s.ok() && l.ok());
    ASSERT_EQ(s->estimate, *l);
    shuffled_err += std::abs(s->estimate - 320);
    local_err += std::abs(*l - 320);
  }
  EXPECT_EQ(shuffled_err, local_err);
}

TEST(ShuffledToLocalTest, RejectsMultiMessageAndMismatch) {
  EXPECT_FALSE(ShuffledToLocal(HistogramRandomizer({10, 3, 1.0}),
                               HistogramAnalyzer({10, 3, 1.0}))
                   .ok());
  EXPECT_FALSE(
      ShuffledToLocal(BitSumRandomizer({10, 1.0}), BitSumAnalyzer({10, 2.0}))
          .ok());
  EXPECT_TRUE(ShuffledToLocal(HistogramRandomizer({10, 1, 1.0}),
                              HistogramAnalyzer({10, 1, 1.0}))
                  .ok());
}

TEST(HistogramTest, UnclampedEstimatesSumToNInExpectation) {
  constexpr std::int64_t kN = 300;
  constexpr int kDomain = 6;
  const HistogramParams params{kN, kDomain, 120.0};
  std::vector<int> values(kN);
  for (std::int64_t i = 0; i < kN; ++i) values[i] = static_cast<int>(i % 4);
  const RandomSource root(12);
  constexpr int kTrials = 4000;
  double sum = 0, sq = 0;
  for (int t = 0; t < kTrials; ++t) {
    auto run = RunProtocol(HistogramRandomizer(params),
                           HistogramAnalyzer(params), values, root.Stream(t));
    ASSERT_TRUE(run.ok());
    const double total = run->estimate.sum();
    sum += total;
    sq += total * total;
  }
  const double mean = sum / kTrials;
  const double se = std::sqrt((sq / kTrials - mean * mean) / kTrials);
  EXPECT_NEAR(mean, static_cast<double>(kN), 4 * se);
}

TEST(SelectionTest, InvariantUnderUserPermutation) {
  BitMatrix m = BitMatrix::Zero(60, 5);
  RandomSource rng(13);
  for (int i = 0; i < 60; ++i) {
    for (int j = 0; j < 5; ++j) m(i, j) = rng.Bernoulli(0.2 + 0.1 * j);
  }
  BitMatrix reversed = m.colwise().reverse();
  const BinaryMatrixDataset a = *BinaryMatrixDataset::Create(m);
  const BinaryMatrixDataset b = *BinaryMatrixDataset::Create(reversed);
  EXPECT_EQ(a.ColumnSums(), b.ColumnSums());
  EXPECT_EQ(*SelectionProtocol(a, kBudget, RandomSource(1), {0.0}),
            *SelectionProtocol(b, kBudget, RandomSource(2), {0.0}));
}

TEST(ApplicationsTest, NoNoiseEverywhereIsExact) {
  std::vector<int> values(90);
  for (int i = 0; i < 90; ++i) values[i] = (i * 7) % 5;
  const CategoricalDataset cats = *CategoricalDataset::Create(values, 5);
  EXPECT_EQ(*HistogramProtocol(cats, kBudget, RandomSource(3), {0.0}),
            cats.Histogram());
  const BinaryMatrixDataset data = Matrix(40, 3, {12, 7, 13});
  EXPECT_EQ(*SelectionProtocol(data, kBudget, RandomSource(3), {0.0}), 2);
}

TEST(ShuffledToLocalTest, WrappedRandomizerIsLocallyPrivate) {
  constexpr std::int64_t kN = 10000;
  const double lambda = *LambdaStar(kN, kBudget);
  auto local =
      ShuffledToLocal(BitSumRandomizer({kN, lambda}), BitSumAnalyzer({kN, lambda}));
  ASSERT_TRUE(local.ok());
  const double eps_s = *EpsilonOfLambda(kN, lambda, kBudget.delta);
  auto r = VerifyRandomizerLocalDp(local->randomizer().params().n,
                                   local->randomizer().params().lambda,
                                   eps_s + std::log(static_cast<double>(kN)));
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(r->pass);
}

}  // namespace
}  // namespace shuffledp
