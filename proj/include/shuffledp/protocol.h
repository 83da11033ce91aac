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

#ifndef SHUFFLEDP_PROTOCOL_H_
#define SHUFFLEDP_PROTOCOL_H_

#include <concepts>
#include <cstdint>
#include <limits>
#include <ranges>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "shuffledp/random.h"
#include "shuffledp/shuffler.h"

namespace shuffledp {

// One bit sent in a given round of a composed protocol. The round tag lets the
// analyzer (and the privacy checks) look at each sub-protocol separately;
// analyzers that only need the grand sum ignore it.
struct TaggedBit {
  std::uint32_t round = 0;
  std::uint8_t bit = 0;

  friend bool operator==(const TaggedBit&, const TaggedBit&) = default;
  friend auto operator<=>(const TaggedBit&, const TaggedBit&) = default;
};

// The shuffled multiset of messages the analyzer sees.
template <typename M>
struct Transcript {
  std::vector<M> messages;
  int messages_per_user = 1;
};

template <typename M, typename Output>
struct RunResult {
  Output estimate;
  Transcript<M> transcript;
};

// A local randomizer appends its messages for one user to `out`.
template <typename R>
concept LocalRandomizer = requires(const R& r, const typename R::Input& x,
                                   RandomSource& rng,
                                   std::vector<typename R::Message>& out) {
  typename R::Params;
  { r.params() } -> std::convertible_to<typename R::Params>;
  { r.messages_per_user() } -> std::convertible_to<int>;
  r.Randomize(x, rng, out);
};

template <typename A, typename M>
concept ShuffledAnalyzer =
    requires(const A& a, std::span<const M> messages) {
      typename A::Params;
      typename A::Output;
      { a.params() } -> std::convertible_to<typename A::Params>;
      {
        a.Analyze(messages)
      } -> std::same_as<absl::StatusOr<typename A::Output>>;
    };

// Stream ids reserved by the protocol runner. User i draws from stream i; the
// shuffler draws from kShuffleStream.
inline constexpr std::uint64_t kShuffleStream =
    std::numeric_limits<std::uint64_t>::max();

// Runs every user's randomizer on its own stream of `rng`, collects all
// messages and passes them through the shuffler to the analyzer. The result
// is a deterministic function of (rng, data, parameters).
template <LocalRandomizer R, typename A, std::ranges::random_access_range Data>
  requires ShuffledAnalyzer<A, typename R::Message> &&
           std::same_as<typename R::Params, typename A::Params>
absl::StatusOr<RunResult<typename R::Message, typename A::Output>> RunProtocol(
    const R& randomizer, const A& analyzer, const Data& data,
    const RandomSource& rng) {
  if (!(randomizer.params() == analyzer.params())) {
    return absl::InvalidArgumentError(
        "randomizer and analyzer were configured with different parameters");
  }
  using M = typename R::Message;
  Transcript<M> transcript;
  transcript.messages_per_user = randomizer.messages_per_user();
  const auto n = std::ranges::size(data);
  transcript.messages.reserve(n * transcript.messages_per_user);
  for (std::size_t i = 0; i < n; ++i) {
    RandomSource user_rng = rng.Stream(i);
    randomizer.Randomize(data[i], user_rng, transcript.messages);
  }
  RandomSource shuffle_rng = rng.Stream(kShuffleStream);
  ShuffleInPlace(std::span<M>(transcript.messages), shuffle_rng);
  absl::StatusOr<typename A::Output> estimate =
      analyzer.Analyze(std::span<const M>(transcript.messages));
  if (!estimate.ok()) return estimate.status();
  return RunResult<M, typename A::Output>{*std::move(estimate),
                                          std::move(transcript)};
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_PROTOCOL_H_
