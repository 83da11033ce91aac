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

#ifndef SHUFFLEDP_PRIVACY_ORACLE_H_
#define SHUFFLEDP_PRIVACY_ORACLE_H_

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "absl/status/statusor.h"
#include "shuffledp/privacy_budget.h"
#include "shuffledp/random.h"

namespace shuffledp {

// Exact probability mass function over {0, ..., n}.
class DiscretePMF {
 public:
  // Entries must be non-negative and sum to 1 within 1e-10.
  static absl::StatusOr<DiscretePMF> Create(Eigen::VectorXd probs);

  const Eigen::VectorXd& probs() const { return probs_; }
  std::int64_t size() const { return probs_.size(); }
  double operator[](std::int64_t t) const { return probs_[t]; }
  double Mean() const;

 private:
  explicit DiscretePMF(Eigen::VectorXd probs) : probs_(std::move(probs)) {}
  Eigen::VectorXd probs_;
};

// Law of the shuffled bit-sum output sum_i y_i on any dataset with k ones, as
// the mixture that defines C_lambda:
//   P[y = t] = sum_s Bin(n, lambda/n)(s) sum_h HG(n, k, s)(h) Bin(s, 1/2)(t - (k - h)).
// Every term is evaluated in log space. Cost is O(n^3); prefer ShuffledSumPmf
// for large n. Requires 0 <= k <= n and 0 <= lambda <= n.
absl::StatusOr<DiscretePMF> CLambdaPmf(std::int64_t k, std::int64_t n,
                                       double lambda);

// The same law computed from the randomizer side: the k ones report 1 with
// probability 1 - lambda/(2n), the n - k zeros with probability lambda/(2n),
// independently, so the sum is Bin(k, 1 - q) convolved with Bin(n - k, q).
// O(n^2).
absl::StatusOr<DiscretePMF> ShuffledSumPmf(std::int64_t k, std::int64_t n,
                                           double lambda);

// Tight delta at level eps: sum_t max(0, P(t) - e^eps Q(t)).
absl::StatusOr<double> HockeyStick(const DiscretePMF& p, const DiscretePMF& q,
                                   double eps);

// Neighbouring inputs for which a delta was measured: the output law on
// `from_k` ones is compared against the law on `to_k` ones.
struct NeighborPair {
  std::int64_t from_k = 0;
  std::int64_t to_k = 0;
};

struct DPReport {
  double eps_tested = 0;
  double delta_measured = 0;
  double delta_allowed = 0;
  NeighborPair worst_pair;
  bool pass = false;
  // Smallest eps with zero delta, when the check computes it (local checks).
  std::optional<double> eps_measured;
};

enum class PmfRoute { kProduct, kMixture };

struct VerifyOptions {
  std::int64_t max_n = 2000;
  PmfRoute route = PmfRoute::kProduct;
};

// Exact (eps, delta) check of the one-message bit-sum protocol. Scans every
// neighbouring pair (k, k + 1), k in [0, n), in both directions and reports
// the largest hockey-stick divergence at budget.eps. Because the shuffled
// output depends on the data only through the number of ones, this covers
// every pair of neighbouring datasets. lambda = n is allowed.
absl::StatusOr<DPReport> VerifyShuffledDp(std::int64_t n, double lambda,
                                          const PrivacyBudget& budget,
                                          const VerifyOptions& options = {});

// Smallest eps at which the exact delta of the bit-sum protocol is at most
// `delta`, to relative precision 1e-9. Infinity when no finite eps works.
absl::StatusOr<double> TightEpsilon(std::int64_t n, double lambda,
                                    double delta,
                                    const VerifyOptions& options = {});

// Pure local DP check of a randomizer with binary input and output, given
// P[out = 1 | in = 1] and P[out = 1 | in = 0]. delta_allowed is 0.
DPReport VerifyBinaryRandomizerLocalDp(double p_one_given_one,
                                       double p_one_given_zero,
                                       double eps_target);

// Local DP of the bit-sum randomizer alone: the worst likelihood ratio is
// 2n/lambda - 1. lambda = 0 reports a failure with eps_measured = infinity.
absl::StatusOr<DPReport> VerifyRandomizerLocalDp(std::int64_t n, double lambda,
                                                 double eps_target);

struct ChiSquareResult {
  double statistic = 0;
  int degrees_of_freedom = 0;
  double p_value = 1;
};

// Pearson goodness-of-fit of `counts` (indexed by outcome) against `pmf`.
// Adjacent outcomes are merged left to right until each bin expects at least
// `min_expected` observations.
absl::StatusOr<ChiSquareResult> ChiSquareGoodnessOfFit(
    std::span<const std::int64_t> counts, const DiscretePMF& pmf,
    double min_expected = 5.0);

// Simulates `trials` runs of sum_i RandomizeBit(x_i) on a dataset of n users
// with k ones at randomly permuted positions and tests the outcome counts
// against CLambdaPmf(oracle_k, n, lambda), oracle_k defaulting to k.
// Requires trials >= 1e5.
absl::StatusOr<ChiSquareResult> EmpiricalEquivalenceTest(
    std::int64_t n, double lambda, std::int64_t k, std::int64_t trials,
    const RandomSource& rng, std::optional<std::int64_t> oracle_k = {});

// Draws outcomes from a PMF by inverse CDF.
class PmfSampler {
 public:
  explicit PmfSampler(const DiscretePMF& pmf);
  std::int64_t operator()(RandomSource& rng) const;

 private:
  std::vector<double> cdf_;
};

}  // namespace shuffledp

#endif  // SHUFFLEDP_PRIVACY_ORACLE_H_
