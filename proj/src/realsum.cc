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

#include "shuffledp/realsum.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace shuffledp {
namespace {

// Appends the encoding of x to `out` as round-tagged bits, then randomizes
// them with `bitsum` when given. The encoding draw always comes first.
void EncodeInto(double x, int rounds, const BitSumParams* bitsum,
                RandomSource& rng, std::vector<TaggedBit>& out) {
  std::int64_t mu = 0;
  double p = 0;
  if (x > 0) {
    const double scaled = x * rounds;
    mu = static_cast<std::int64_t>(std::ceil(scaled));
    p = scaled - static_cast<double>(mu) + 1.0;
  }
  for (int j = 1; j <= rounds; ++j) {
    Bit b = 0;
    if (j < mu) {
      b = 1;
    } else if (j == mu) {
      b = rng.Bernoulli(p) ? 1 : 0;
    }
    out.push_back({static_cast<std::uint32_t>(j - 1), b});
  }
  if (bitsum == nullptr) return;
  for (auto it = out.end() - rounds; it != out.end(); ++it) {
    it->bit = RandomizeBit(it->bit, *bitsum, rng);
  }
}

}  // namespace

absl::Status ValidateRealSumParams(const RealSumParams& params) {
  if (absl::Status s = ValidateBitSumParams(params.bitsum()); !s.ok()) {
    return s;
  }
  if (params.rounds < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("rounds must be at least 1, got ", params.rounds));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<Bit>> EncodeReal(double x, int rounds,
                                            RandomSource& rng) {
  if (!(x >= 0.0 && x <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("value must be in [0, 1], got ", x));
  }
  if (rounds < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("rounds must be at least 1, got ", rounds));
  }
  std::vector<TaggedBit> tagged;
  tagged.reserve(rounds);
  EncodeInto(x, rounds, nullptr, rng, tagged);
  std::vector<Bit> bits(tagged.size());
  std::transform(tagged.begin(), tagged.end(), bits.begin(),
                 [](const TaggedBit& t) { return t.bit; });
  return bits;
}

absl::StatusOr<std::vector<TaggedBit>> RandomizeReal(
    double x, const RealSumParams& params, RandomSource& rng) {
  if (absl::Status s = ValidateRealSumParams(params); !s.ok()) return s;
  if (!(x >= 0.0 && x <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("value must be in [0, 1], got ", x));
  }
  std::vector<TaggedBit> out;
  out.reserve(params.rounds);
  RealSumRandomizer(params).Randomize(x, rng, out);
  return out;
}

void RealSumRandomizer::Randomize(double x, RandomSource& rng,
                                  std::vector<TaggedBit>& out) const {
  const BitSumParams bitsum = params_.bitsum();
  EncodeInto(x, params_.rounds, &bitsum, rng, out);
}

absl::StatusOr<double> AnalyzeReal(std::span<const TaggedBit> messages,
                                   const RealSumParams& params) {
  if (absl::Status s = ValidateRealSumParams(params); !s.ok()) return s;
  std::vector<std::int64_t> per_round(params.rounds, 0);
  std::int64_t ones = 0;
  for (const TaggedBit& m : messages) {
    if (m.round >= static_cast<std::uint32_t>(params.rounds)) {
      return absl::InvalidArgumentError(
          absl::StrCat("message carries round ", m.round, " but there are ",
                       params.rounds, " rounds"));
    }
    ++per_round[m.round];
    ones += m.bit;
  }
  for (int j = 0; j < params.rounds; ++j) {
    if (per_round[j] != params.n) {
      return absl::InvalidArgumentError(absl::StrCat(
          "round ", j, " has ", per_round[j], " messages, expected ", params.n));
    }
  }
  const double n = static_cast<double>(params.n);
  const double r = params.rounds;
  return (1.0 / r) * (n / (n - params.lambda)) *
         (static_cast<double>(ones) - params.lambda * r / 2.0);
}

absl::StatusOr<RealSumPlan> PlanRealSum(std::int64_t n,
                                        const PrivacyBudget& budget,
                                        const RealSumOptions& options) {
  if (absl::Status s = ValidatePrivacyBudget(budget); !s.ok()) return s;
  if (n < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("n must be at least 1, got ", n));
  }
  int rounds = 0;
  if (options.rounds.has_value()) {
    rounds = *options.rounds;
    if (rounds < 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("rounds must be at least 1, got ", rounds));
    }
  } else {
    const double wanted = std::ceil(budget.eps * std::sqrt(static_cast<double>(n)));
    rounds = static_cast<int>(
        std::clamp<double>(wanted, 1.0, static_cast<double>(n)));
  }
  RealSumPlan plan;
  plan.eps0 = budget.eps / std::sqrt(8.0 * rounds * std::log(2.0 / budget.delta));
  plan.delta0 = budget.delta / (2.0 * rounds);
  absl::StatusOr<double> lambda = LambdaStar(n, {plan.eps0, plan.delta0});
  if (!lambda.ok()) {
    return absl::FailedPreconditionError(
        absl::StrCat("real-sum budget infeasible with r = ", rounds,
                     " rounds (eps0 = ", plan.eps0, ", delta0 = ", plan.delta0,
                     "): ", lambda.status().message()));
  }
  plan.params = {n, *lambda, rounds};
  if (!(plan.params.lambda < static_cast<double>(n))) {
    return absl::FailedPreconditionError(
        "real-sum budget needs lambda = n, where the analyzer is undefined");
  }
  return plan;
}

absl::StatusOr<double> RealSumAccuracyBound(const RealSumParams& params,
                                            double beta) {
  if (absl::Status s = ValidateRealSumParams(params); !s.ok()) return s;
  if (!(beta > 0 && beta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("beta must be in (0, 1), got ", beta));
  }
  const double log_term = std::log(2.0 / beta);
  if (!(params.lambda >= 16.0 / 9.0 * log_term)) {
    return absl::OutOfRangeError(absl::StrCat(
        "accuracy bound needs lambda >= (16/9) ln(2/beta) = ",
        16.0 / 9.0 * log_term, ", got ", params.lambda));
  }
  const double n = static_cast<double>(params.n);
  const double r = params.rounds;
  const double rounding = std::sqrt(2.0) / r * std::sqrt(n * log_term);
  const double noise = n / (n - params.lambda) *
                       std::sqrt(2.0 * params.lambda / r * log_term);
  return rounding + noise;
}

}  // namespace shuffledp
