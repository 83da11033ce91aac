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

#include <algorithm>
#include <cmath>
#include <limits>

namespace shuffledp {
namespace {

// Number of ones in each round; every round must hold exactly n messages.
absl::StatusOr<Eigen::VectorXd> OnesPerRound(
    std::span<const TaggedBit> messages, int rounds, std::int64_t n) {
  Eigen::VectorXd ones = Eigen::VectorXd::Zero(rounds);
  std::vector<std::int64_t> seen(rounds, 0);
  for (const TaggedBit& m : messages) {
    if (m.round >= static_cast<std::uint32_t>(rounds)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "message carries round ", m.round, " but there are ", rounds));
    }
    ++seen[m.round];
    ones[m.round] += m.bit;
  }
  for (int j = 0; j < rounds; ++j) {
    if (seen[j] != n) {
      return absl::InvalidArgumentError(absl::StrCat(
          "round ", j, " has ", seen[j], " messages, expected ", n));
    }
  }
  return ones;
}

Eigen::VectorXd Debias(const Eigen::VectorXd& ones, std::int64_t n,
                       double lambda) {
  const double nd = static_cast<double>(n);
  return (nd / (nd - lambda)) * (ones.array() - lambda / 2).matrix();
}

}  // namespace

void HistogramRandomizer::Randomize(int value, RandomSource& rng,
                                    std::vector<TaggedBit>& out) const {
  const BitSumParams bitsum{params_.n, params_.lambda};
  for (int j = 0; j < params_.domain_size; ++j) {
    const Bit indicator = value == j ? 1 : 0;
    out.push_back({static_cast<std::uint32_t>(j),
                   RandomizeBit(indicator, bitsum, rng)});
  }
}

absl::StatusOr<Eigen::VectorXd> HistogramAnalyzer::Analyze(
    std::span<const TaggedBit> messages) const {
  if (absl::Status s = ValidateBitSumParams({params_.n, params_.lambda});
      !s.ok()) {
    return s;
  }
  absl::StatusOr<Eigen::VectorXd> ones =
      OnesPerRound(messages, params_.domain_size, params_.n);
  if (!ones.ok()) return ones.status();
  return Debias(*ones, params_.n, params_.lambda);
}

absl::StatusOr<double> HistogramLambda(std::int64_t n,
                                       const PrivacyBudget& budget) {
  if (absl::Status s = ValidatePrivacyBudget(budget); !s.ok()) return s;
  absl::StatusOr<double> lambda =
      LambdaStar(n, {budget.eps / 2, budget.delta / 2});
  if (!lambda.ok()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "histogram budget infeasible: ", lambda.status().message()));
  }
  if (!(*lambda < static_cast<double>(n))) {
    return absl::FailedPreconditionError(
        "histogram budget needs lambda = n, where the analyzer is undefined");
  }
  return lambda;
}

absl::StatusOr<Eigen::VectorXd> HistogramProtocol(
    const CategoricalDataset& data, const PrivacyBudget& budget,
    const RandomSource& rng, const HistogramOptions& options) {
  double lambda = 0;
  if (options.lambda.has_value()) {
    lambda = *options.lambda;
  } else {
    absl::StatusOr<double> chosen = HistogramLambda(data.n(), budget);
    if (!chosen.ok()) return chosen.status();
    lambda = *chosen;
  }
  const HistogramParams params{data.n(), data.domain_size(), lambda};
  auto run = RunProtocol(HistogramRandomizer(params),
                         HistogramAnalyzer(params), data.values(), rng);
  if (!run.ok()) return run.status();
  return run->estimate.cwiseMax(0.0).cwiseMin(static_cast<double>(data.n()));
}

bool CheckHistogram(const CategoricalDataset& data, const Eigen::VectorXd& v) {
  if (v.size() != data.domain_size()) return false;
  const double worst = (v - data.Histogram()).cwiseAbs().maxCoeff();
  return worst <= static_cast<double>(data.n()) / 10.0;
}

void SelectionRandomizer::Randomize(std::span<const Bit> row,
                                    RandomSource& rng,
                                    std::vector<TaggedBit>& out) const {
  const BitSumParams bitsum{params_.n, params_.lambda};
  for (int j = 0; j < params_.columns; ++j) {
    out.push_back(
        {static_cast<std::uint32_t>(j), RandomizeBit(row[j], bitsum, rng)});
  }
}

absl::StatusOr<Eigen::VectorXd> SelectionAnalyzer::Analyze(
    std::span<const TaggedBit> messages) const {
  if (absl::Status s = ValidateBitSumParams({params_.n, params_.lambda});
      !s.ok()) {
    return s;
  }
  absl::StatusOr<Eigen::VectorXd> ones =
      OnesPerRound(messages, params_.columns, params_.n);
  if (!ones.ok()) return ones.status();
  return Debias(*ones, params_.n, params_.lambda);
}

absl::StatusOr<SelectionPlan> PlanSelection(std::int64_t n, int columns,
                                            const PrivacyBudget& budget) {
  absl::StatusOr<RoundBudget> rounds = PerRoundBudget(budget, columns);
  if (!rounds.ok()) return rounds.status();
  absl::StatusOr<PrivacyBudget> composed = Compose(
      rounds->eps0, rounds->delta0, columns, rounds->delta_prime);
  if (!composed.ok()) return composed.status();
  if (composed->eps > budget.eps || composed->delta > budget.delta) {
    return absl::InternalError(absl::StrCat(
        "per-round budget composes to (", composed->eps, ", ", composed->delta,
        "), above the target (", budget.eps, ", ", budget.delta, ")"));
  }
  absl::StatusOr<double> lambda =
      LambdaStar(n, {rounds->eps0, rounds->delta0});
  if (!lambda.ok()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "selection budget infeasible: ", lambda.status().message()));
  }
  if (!(*lambda < static_cast<double>(n))) {
    return absl::FailedPreconditionError(
        "selection budget needs lambda = n, where the analyzer is undefined");
  }
  return SelectionPlan{*rounds, *lambda};
}

int ArgMaxLowestIndex(const Eigen::VectorXd& values) {
  int best = 0;
  for (int j = 1; j < values.size(); ++j) {
    if (values[j] > values[best]) best = j;
  }
  return best;
}

absl::StatusOr<int> SelectionProtocol(const BinaryMatrixDataset& data,
                                      const PrivacyBudget& budget,
                                      const RandomSource& rng,
                                      const SelectionOptions& options) {
  double lambda = 0;
  if (options.lambda.has_value()) {
    lambda = *options.lambda;
  } else {
    absl::StatusOr<SelectionPlan> plan =
        PlanSelection(data.n(), data.d(), budget);
    if (!plan.ok()) return plan.status();
    lambda = plan->lambda;
  }
  const SelectionParams params{data.n(), data.d(), lambda};
  auto run = RunProtocol(SelectionRandomizer(params),
                         SelectionAnalyzer(params), data.RowViews(), rng);
  if (!run.ok()) return run.status();
  return ArgMaxLowestIndex(run->estimate);
}

bool CheckSelection(const BinaryMatrixDataset& data, int j) {
  if (j < 0 || j >= data.d()) return false;
  const Eigen::VectorXd sums = data.ColumnSums();
  return sums[j] >= sums.maxCoeff() - static_cast<double>(data.n()) / 10.0;
}

double RandomizedResponseKeepProbability(double eps) {
  if (std::isinf(eps)) return 1.0;
  return 1.0 / (1.0 + std::exp(-eps));
}

absl::StatusOr<double> LocalBaselineBitSum(const BitDataset& data, double eps,
                                           const RandomSource& rng) {
  if (!(eps > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive, got ", eps));
  }
  const double keep = RandomizedResponseKeepProbability(eps);
  std::int64_t ones = 0;
  const std::span<const Bit> bits = data.bits();
  for (std::size_t i = 0; i < bits.size(); ++i) {
    RandomSource user_rng = rng.Stream(i);
    const bool truthful = user_rng.Bernoulli(keep);
    ones += truthful ? bits[i] : 1 - bits[i];
  }
  const double n = static_cast<double>(data.n());
  return (static_cast<double>(ones) - n * (1.0 - keep)) / (2.0 * keep - 1.0);
}

}  // namespace shuffledp
