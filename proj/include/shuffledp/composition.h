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

#ifndef SHUFFLEDP_COMPOSITION_H_
#define SHUFFLEDP_COMPOSITION_H_

#include "absl/status/statusor.h"
#include "shuffledp/privacy_budget.h"

namespace shuffledp {

// Advanced composition of T mechanisms that are each (eps0, delta0)-DP:
//   eps'   = eps0 (e^eps0 - 1) T + eps0 sqrt(2 T ln(1/delta_prime))
//   delta' = delta_prime + T delta0
// The result may exceed the domain of a valid target budget (e.g. delta >= 1)
// when the inputs are loose; callers compare it against their target.
absl::StatusOr<PrivacyBudget> Compose(double eps0, double delta0, int rounds,
                                      double delta_prime);

// Per-round parameters that compose back into a target budget.
struct RoundBudget {
  double eps0 = 0;
  double delta0 = 0;
  double delta_prime = 0;
};

// Splits `target` over `rounds` rounds: delta_prime = delta / 2,
// delta0 = delta / (2 rounds), and eps0 is the largest value (to relative
// slack 1e-6) whose composition stays within target.eps. The composition of
// the result never exceeds the target in either coordinate.
absl::StatusOr<RoundBudget> PerRoundBudget(const PrivacyBudget& target,
                                           int rounds);

}  // namespace shuffledp

#endif  // SHUFFLEDP_COMPOSITION_H_
