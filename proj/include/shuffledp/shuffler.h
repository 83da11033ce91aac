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

#ifndef SHUFFLEDP_SHUFFLER_H_
#define SHUFFLEDP_SHUFFLER_H_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "shuffledp/random.h"

namespace shuffledp {

// Uniformly random permutation of `messages` in place (Fisher-Yates).
template <typename M>
void ShuffleInPlace(std::span<M> messages, RandomSource& rng) {
  for (std::size_t i = messages.size(); i > 1; --i) {
    const std::size_t j = rng.UniformInt(i);
    using std::swap;
    swap(messages[i - 1], messages[j]);
  }
}

template <typename M>
std::vector<M> Shuffle(std::vector<M> messages, RandomSource& rng) {
  ShuffleInPlace(std::span<M>(messages), rng);
  return messages;
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_SHUFFLER_H_
