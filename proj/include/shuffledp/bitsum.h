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

#ifndef SHUFFLEDP_BITSUM_H_
#define SHUFFLEDP_BITSUM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "shuffledp/datasets.h"
#include "shuffledp/privacy_budget.h"
#include "shuffledp/random.h"

namespace shuffledp {

// Configuration of the one-message bit-sum protocol: n users, of which
// lambda are expected to replace their bit with a uniformly random one.
struct BitSumParams {
  std::int64_t n = 1;
  double lambda = 0;

  friend bool operator==(const BitSumParams&, const BitSumParams&) = default;
};

// Requires n >= 1 and 0 <= lambda < n.
absl::Status ValidateBitSumParams(const BitSumParams& params);

// With probability lambda/n outputs a fair coin, otherwise outputs x.
Bit RandomizeBit(Bit x, const BitSumParams& params, RandomSource& rng);

// Debiased sum n/(n - lambda) * (sum(ys) - lambda/2). Not clamped.
absl::StatusOr<double> AnalyzeBits(std::span<const Bit> ys,
                                   const BitSumParams& params);

// Closed-form lambda that makes the protocol (eps, delta)-DP:
//   64/eps^2 ln(4/delta)                          if eps >= sqrt(192 ln(4/delta)/n)
//   n - eps n^{3/2} / sqrt(432 ln(4/delta))       otherwise.
// Valid for n >= 14 ln(4/delta) and sqrt(3456) ln(4/delta)/n < eps < 1.
absl::StatusOr<double> LambdaClosedForm(std::int64_t n,
                                        const PrivacyBudget& budget);

// Smallest lambda accepted by EpsilonOfLambda for this delta: 14 ln(4/delta).
double MinProvableLambda(double delta);

// The epsilon at which lambda is proven to give (eps, delta)-DP:
//   sqrt(32 ln(4/delta) / L) * (1 - L/n),  L = lambda - sqrt(2 lambda ln(2/delta)).
// Requires 14 ln(4/delta) <= lambda <= n.
absl::StatusOr<double> EpsilonOfLambda(std::int64_t n, double lambda,
                                       double delta);

// Minimal lambda in [14 ln(4/delta), n] with EpsilonOfLambda <= budget.eps,
// found by bisection to absolute tolerance 1e-6 n. Fails when even lambda = n
// is not enough.
absl::StatusOr<double> LambdaStar(std::int64_t n, const PrivacyBudget& budget);

// Error alpha with P[|estimate - sum| > alpha] <= beta:
//   sqrt(2 lambda ln(2/beta)) * n/(n - lambda).
// Requires n > lambda >= 2 ln(2/beta).
absl::StatusOr<double> BitSumAccuracyBound(std::int64_t n, double lambda,
                                           double beta);

class BitSumRandomizer {
 public:
  using Params = BitSumParams;
  using Input = Bit;
  using Message = Bit;

  explicit BitSumRandomizer(BitSumParams params) : params_(params) {}

  const BitSumParams& params() const { return params_; }
  int messages_per_user() const { return 1; }
  void Randomize(Bit x, RandomSource& rng, std::vector<Bit>& out) const {
    out.push_back(RandomizeBit(x, params_, rng));
  }

 private:
  BitSumParams params_;
};

class BitSumAnalyzer {
 public:
  using Params = BitSumParams;
  using Output = double;

  explicit BitSumAnalyzer(BitSumParams params) : params_(params) {}

  const BitSumParams& params() const { return params_; }
  absl::StatusOr<double> Analyze(std::span<const Bit> ys) const {
    return AnalyzeBits(ys, params_);
  }

 private:
  BitSumParams params_;
};

}  // namespace shuffledp

#endif  // SHUFFLEDP_BITSUM_H_
