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

#ifndef SHUFFLEDP_PRIVACY_BUDGET_H_
#define SHUFFLEDP_PRIVACY_BUDGET_H_

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace shuffledp {

// An (epsilon, delta) differential privacy guarantee.
struct PrivacyBudget {
  double eps = 0;
  double delta = 0;
};

// Requires eps > 0 and 0 < delta < 1.
inline absl::Status ValidatePrivacyBudget(const PrivacyBudget& budget) {
  if (!(budget.eps > 0) || std::isnan(budget.eps)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive, got ", budget.eps));
  }
  if (!(budget.delta > 0 && budget.delta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must be in (0, 1), got ", budget.delta));
  }
  return absl::OkStatus();
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_PRIVACY_BUDGET_H_
