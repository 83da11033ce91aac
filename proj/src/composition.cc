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

#include "shuffledp/composition.h"

#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"

namespace shuffledp {
namespace {

double ComposedEpsilon(double eps0, int rounds, double delta_prime) {
  return eps0 * std::expm1(eps0) * rounds +
         eps0 * std::sqrt(2.0 * rounds * std::log(1.0 / delta_prime));
}

// Relative slack allowed between the composed epsilon and the target.
constexpr double kEpsilonSlack = 1e-6;

}  // namespace

absl::StatusOr<PrivacyBudget> Compose(double eps0, double delta0, int rounds,
                                      double delta_prime) {
  if (rounds < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("number of rounds must be at least 1, got ", rounds));
  }
  if (!(eps0 > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("per-round epsilon must be positive, got ", eps0));
  }
  if (!(delta0 >= 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("per-round delta must be non-negative, got ", delta0));
  }
  if (!(delta_prime > 0 && delta_prime < 1)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "composition slack delta' must be in (0, 1), got ", delta_prime));
  }
  return PrivacyBudget{ComposedEpsilon(eps0, rounds, delta_prime),
                       delta_prime + rounds * delta0};
}

absl::StatusOr<RoundBudget> PerRoundBudget(const PrivacyBudget& target,
                                           int rounds) {
  if (absl::Status s = ValidatePrivacyBudget(target); !s.ok()) return s;
  if (rounds < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("number of rounds must be at least 1, got ", rounds));
  }
  RoundBudget out;
  out.delta_prime = target.delta / 2;
  out.delta0 = target.delta / (2.0 * rounds);
  while (out.delta_prime + rounds * out.delta0 > target.delta) {
    out.delta0 = std::nextafter(out.delta0, 0.0);
  }

  // The forward map is increasing in eps0 and exceeds eps0 itself because
  // 2 ln(1/delta') > 1 for delta' < 1/2, so [0, eps] brackets the answer.
  double lo = 0.0;
  double hi = target.eps;
  if (!(ComposedEpsilon(hi, rounds, out.delta_prime) >= target.eps)) {
    return absl::InternalError("per-round epsilon search failed to bracket");
  }
  while (hi - lo > 1e-12 * target.eps) {
    const double mid = 0.5 * (lo + hi);
    if (ComposedEpsilon(mid, rounds, out.delta_prime) <= target.eps) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (!(lo > 0) || ComposedEpsilon(lo, rounds, out.delta_prime) <
                       target.eps * (1 - kEpsilonSlack)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "no positive per-round epsilon composes into eps=", target.eps,
        " over ", rounds, " rounds"));
  }
  out.eps0 = lo;
  return out;
}

}  // namespace shuffledp
