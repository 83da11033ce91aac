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

#ifndef SHUFFLEDP_REALSUM_H_
#define SHUFFLEDP_REALSUM_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "shuffledp/bitsum.h"
#include "shuffledp/privacy_budget.h"
#include "shuffledp/protocol.h"
#include "shuffledp/random.h"

namespace shuffledp {

// r parallel bit-sum rounds over randomized-rounding encodings of reals.
struct RealSumParams {
  std::int64_t n = 1;
  double lambda = 0;
  int rounds = 1;

  BitSumParams bitsum() const { return {n, lambda}; }
  friend bool operator==(const RealSumParams&, const RealSumParams&) = default;
};

absl::Status ValidateRealSumParams(const RealSumParams& params);

// Randomized rounding of x in [0, 1] to `rounds` bits whose mean is x in
// expectation: with mu = ceil(x r) and p = x r - mu + 1, bits 1..mu-1 are 1,
// bit mu is Ber(p) and the rest are 0. x = 0 encodes to all zeros.
absl::StatusOr<std::vector<Bit>> EncodeReal(double x, int rounds,
                                            RandomSource& rng);

// EncodeReal followed by RandomizeBit on each coordinate. Message j carries
// round tag j.
absl::StatusOr<std::vector<TaggedBit>> RandomizeReal(
    double x, const RealSumParams& params, RandomSource& rng);

// (1/r) n/(n - lambda) (sum of all bits - lambda r / 2). Requires exactly n
// messages in each of the r rounds.
absl::StatusOr<double> AnalyzeReal(std::span<const TaggedBit> messages,
                                   const RealSumParams& params);

// Parameters chosen for a target budget, together with the per-round
// guarantee they were derived from.
struct RealSumPlan {
  RealSumParams params;
  double eps0 = 0;
  double delta0 = 0;
};

struct RealSumOptions {
  // Replaces the default round count max(1, ceil(eps sqrt(n))), capped at n.
  std::optional<int> rounds;
};

// rounds r as above, eps0 = eps / sqrt(8 r ln(2/delta)), delta0 = delta/(2r),
// lambda = LambdaStar(n, (eps0, delta0)).
absl::StatusOr<RealSumPlan> PlanRealSum(std::int64_t n,
                                        const PrivacyBudget& budget,
                                        const RealSumOptions& options = {});

// Error alpha with P[|estimate - sum| >= alpha] < 2 beta:
//   sqrt(2)/r sqrt(n ln(2/beta)) + n/(n - lambda) sqrt(2 lambda/r ln(2/beta)).
// Requires lambda >= (16/9) ln(2/beta).
absl::StatusOr<double> RealSumAccuracyBound(const RealSumParams& params,
                                            double beta);

class RealSumRandomizer {
 public:
  using Params = RealSumParams;
  using Input = double;
  using Message = TaggedBit;

  explicit RealSumRandomizer(RealSumParams params) : params_(params) {}

  const RealSumParams& params() const { return params_; }
  int messages_per_user() const { return params_.rounds; }
  // Inputs are assumed to come from a validated RealDataset.
  void Randomize(double x, RandomSource& rng,
                 std::vector<TaggedBit>& out) const;

 private:
  RealSumParams params_;
};

class RealSumAnalyzer {
 public:
  using Params = RealSumParams;
  using Output = double;

  explicit RealSumAnalyzer(RealSumParams params) : params_(params) {}

  const RealSumParams& params() const { return params_; }
  absl::StatusOr<double> Analyze(std::span<const TaggedBit> messages) const {
    return AnalyzeReal(messages, params_);
  }

 private:
  RealSumParams params_;
};

}  // namespace shuffledp

#endif  // SHUFFLEDP_REALSUM_H_
