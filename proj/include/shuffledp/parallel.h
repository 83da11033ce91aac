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

#ifndef SHUFFLEDP_PARALLEL_H_
#define SHUFFLEDP_PARALLEL_H_

#include <cstdint>
#include <functional>

namespace shuffledp {

// Worker count from SHUFFLEDP_THREADS, else the hardware concurrency (>= 1).
int DefaultThreadCount();

// Calls body(i) for every i in [0, count) on up to `threads` workers. Work is
// split into contiguous blocks, so callers writing into slot i of a
// preallocated output get results in index order regardless of timing.
void ParallelFor(std::int64_t count, int threads,
                 const std::function<void(std::int64_t)>& body);

}  // namespace shuffledp

#endif  // SHUFFLEDP_PARALLEL_H_
