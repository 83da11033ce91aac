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

#ifndef SHUFFLEDP_APPLICATIONS_H_
#define SHUFFLEDP_APPLICATIONS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "shuffledp/bitsum.h"
#include "shuffledp/composition.h"
#include "shuffledp/datasets.h"
#include "shuffledp/privacy_budget.h"
#include "shuffledp/protocol.h"
#include "shuffledp/random.h"

namespace shuffledp {

// ---------------------------------------------------------------------------
// Histograms: one bit-sum round per bucket over the one-hot encoding of each
// user's value. Changing one user flips two coordinates, so each round runs
// at (eps/2, delta/2).
// ---------------------------------------------------------------------------

struct HistogramParams {
  std::int64_t n = 1;
  int domain_size = 2;
  double lambda = 0;

  friend bool operator==(const HistogramParams&,
                         const HistogramParams&) = default;
};

class HistogramRandomizer {
 public:
  using Params = HistogramParams;
  using Input = int;
  using Message = TaggedBit;

  explicit HistogramRandomizer(HistogramParams params) : params_(params) {}

  const HistogramParams& params() const { return params_; }
  int messages_per_user() const { return params_.domain_size; }
  void Randomize(int value, RandomSource& rng,
                 std::vector<TaggedBit>& out) const;

 private:
  HistogramParams params_;
};

// Raw (unclamped) debiased count for every bucket.
class HistogramAnalyzer {
 public:
  using Params = HistogramParams;
  using Output = Eigen::VectorXd;

  explicit HistogramAnalyzer(HistogramParams params) : params_(params) {}

  const HistogramParams& params() const { return params_; }
  absl::StatusOr<Eigen::VectorXd> Analyze(
      std::span<const TaggedBit> messages) const;

 private:
  HistogramParams params_;
};

// lambda used by every histogram round: LambdaStar(n, (eps/2, delta/2)).
absl::StatusOr<double> HistogramLambda(std::int64_t n,
                                       const PrivacyBudget& budget);

struct HistogramOptions {
  std::optional<double> lambda;
};

// Per-bucket estimates clamped to [0, n].
absl::StatusOr<Eigen::VectorXd> HistogramProtocol(
    const CategoricalDataset& data, const PrivacyBudget& budget,
    const RandomSource& rng, const HistogramOptions& options = {});

// max_j |v_j - #{i : x_i = j}| <= n/10.
bool CheckHistogram(const CategoricalDataset& data, const Eigen::VectorXd& v);

// ---------------------------------------------------------------------------
// Selection: one bit-sum round per column, composed with advanced
// composition, and the argmax of the estimates.
// ---------------------------------------------------------------------------

struct SelectionParams {
  std::int64_t n = 1;
  int columns = 1;
  double lambda = 0;

  friend bool operator==(const SelectionParams&,
                         const SelectionParams&) = default;
};

class SelectionRandomizer {
 public:
  using Params = SelectionParams;
  using Input = std::span<const Bit>;
  using Message = TaggedBit;

  explicit SelectionRandomizer(SelectionParams params) : params_(params) {}

  const SelectionParams& params() const { return params_; }
  int messages_per_user() const { return params_.columns; }
  void Randomize(std::span<const Bit> row, RandomSource& rng,
                 std::vector<TaggedBit>& out) const;

 private:
  SelectionParams params_;
};

// Raw debiased column sums.
class SelectionAnalyzer {
 public:
  using Params = SelectionParams;
  using Output = Eigen::VectorXd;

  explicit SelectionAnalyzer(SelectionParams params) : params_(params) {}

  const SelectionParams& params() const { return params_; }
  absl::StatusOr<Eigen::VectorXd> Analyze(
      std::span<const TaggedBit> messages) const;

 private:
  SelectionParams params_;
};

struct SelectionPlan {
  RoundBudget round_budget;
  double lambda = 0;
};

// Equal split of `budget` over `columns` rounds, then the per-round lambda.
// The composed guarantee is re-checked against the budget.
absl::StatusOr<SelectionPlan> PlanSelection(std::int64_t n, int columns,
                                            const PrivacyBudget& budget);

struct SelectionOptions {
  std::optional<double> lambda;
};

// Index of the largest estimated column sum; ties go to the lowest index.
absl::StatusOr<int> SelectionProtocol(const BinaryMatrixDataset& data,
                                      const PrivacyBudget& budget,
                                      const RandomSource& rng,
                                      const SelectionOptions& options = {});

// Column j's sum is within n/10 of the largest column sum.
bool CheckSelection(const BinaryMatrixDataset& data, int j);

// Lowest index of the maximum entry.
int ArgMaxLowestIndex(const Eigen::VectorXd& values);

// ---------------------------------------------------------------------------
// Local-model baselines.
// ---------------------------------------------------------------------------

// Probability that eps-LDP randomized response reports the true bit:
// e^eps / (e^eps + 1). Infinite eps gives 1.
double RandomizedResponseKeepProbability(double eps);

// Randomized response per user and the debiased sum
// (sum(y) - n (1 - p)) / (2p - 1).
absl::StatusOr<double> LocalBaselineBitSum(const BitDataset& data, double eps,
                                           const RandomSource& rng);

// A one-message shuffled protocol viewed as a local protocol: the same
// randomizer, with the shuffle moved into the analyzer. Run() consumes
// randomness exactly like RunProtocol, so matched seeds give identical
// estimates.
template <LocalRandomizer R, typename A>
  requires ShuffledAnalyzer<A, typename R::Message>
class LocalProtocol {
 public:
  LocalProtocol(R randomizer, A analyzer)
      : randomizer_(std::move(randomizer)), analyzer_(std::move(analyzer)) {}

  const R& randomizer() const { return randomizer_; }
  const A& analyzer() const { return analyzer_; }

  // Reports in user order, as a local-model analyzer would receive them.
  template <std::ranges::random_access_range Data>
  std::vector<typename R::Message> CollectReports(
      const Data& data, const RandomSource& rng) const {
    std::vector<typename R::Message> reports;
    reports.reserve(std::ranges::size(data));
    for (std::size_t i = 0; i < std::ranges::size(data); ++i) {
      RandomSource user_rng = rng.Stream(i);
      randomizer_.Randomize(data[i], user_rng, reports);
    }
    return reports;
  }

  // The analyzer composed with the shuffler.
  absl::StatusOr<typename A::Output> Analyze(
      std::vector<typename R::Message> reports,
      const RandomSource& rng) const {
    RandomSource shuffle_rng = rng.Stream(kShuffleStream);
    ShuffleInPlace(std::span<typename R::Message>(reports), shuffle_rng);
    return analyzer_.Analyze(
        std::span<const typename R::Message>(reports));
  }

  template <std::ranges::random_access_range Data>
  absl::StatusOr<typename A::Output> Run(const Data& data,
                                         const RandomSource& rng) const {
    return Analyze(CollectReports(data, rng), rng);
  }

 private:
  R randomizer_;
  A analyzer_;
};

// Fails for randomizers that send more than one message per user and for
// mismatched parameters.
template <LocalRandomizer R, typename A>
  requires ShuffledAnalyzer<A, typename R::Message>
absl::StatusOr<LocalProtocol<R, A>> ShuffledToLocal(R randomizer, A analyzer) {
  if (randomizer.messages_per_user() != 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "shuffled-to-local wrapper needs a one-message randomizer, this one "
        "sends ",
        randomizer.messages_per_user()));
  }
  if (!(randomizer.params() == analyzer.params())) {
    return absl::InvalidArgumentError(
        "randomizer and analyzer were configured with different parameters");
  }
  return LocalProtocol<R, A>(std::move(randomizer), std::move(analyzer));
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_APPLICATIONS_H_
