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

#ifndef SHUFFLEDP_RANDOM_H_
#define SHUFFLEDP_RANDOM_H_

#include <cstdint>
#include <limits>

namespace shuffledp {

// Counter-based pseudo-random source. The key is a hash of (seed, stream-id),
// and draw i is SplitMix64(key + i * gamma), so any stream can be derived
// directly without advancing another one. Child streams obtained with
// Stream() are keyed from the parent key, never from its counter, which makes
// per-user and per-trial randomness independent of evaluation order.
//
// Satisfies UniformRandomBitGenerator.
class RandomSource {
 public:
  using result_type = std::uint64_t;

  explicit RandomSource(std::uint64_t seed, std::uint64_t stream_id = 0)
      : key_(Mix(Mix(seed) ^ (stream_id * kGamma + kStreamSalt))) {}

  // Independent child stream; does not depend on how many draws this source
  // has already produced.
  RandomSource Stream(std::uint64_t id) const {
    RandomSource child(0);
    child.key_ = Mix(key_ ^ Mix(id + kStreamSalt));
    return child;
  }

  result_type operator()() {
    ++counter_;
    return Mix(key_ + counter_ * kGamma);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double UniformDouble() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Ber(p). p <= 0 never fires, p >= 1 always fires.
  bool Bernoulli(double p) { return UniformDouble() < p; }

  // Ber(1/2) from the top bit of one draw.
  bool FairCoin() { return ((*this)() >> 63) != 0; }

  // Uniform integer in [0, bound), bound >= 1. Lemire's multiply-shift with
  // rejection, so the result is exactly uniform.
  std::uint64_t UniformInt(std::uint64_t bound) {
    std::uint64_t x = (*this)();
    __uint128_t m = static_cast<__uint128_t>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = -bound % bound;
      while (low < threshold) {
        x = (*this)();
        m = static_cast<__uint128_t>(x) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kStreamSalt = 0x632be59bd9b4e019ULL;

  static constexpr std::uint64_t Mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace shuffledp

#endif  // SHUFFLEDP_RANDOM_H_
