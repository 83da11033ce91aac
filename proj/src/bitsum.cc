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

#include "shuffledp/bitsum.h"

#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"

namespace shuffledp {

absl::Status ValidateBitSumParams(const BitSumParams& params) {
  if (params.n < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("n must be at least 1, got ", params.n));
  }
  if (!(params.lambda >= 0 && params.lambda < static_cast<double>(params.n))) {
    return absl::InvalidArgumentError(absl::StrCat(
        "lambda must be in [0, n) = [0, ", params.n, "), got ", params.lambda));
  }
  return absl::OkStatus();
}

Bit RandomizeBit(Bit x, const BitSumParams& params, RandomSource& rng) {
  if (rng.Bernoulli(params.lambda / static_cast<double>(params.n))) {
    return rng.FairCoin() ? 1 : 0;
  }
  return x;
}

absl::StatusOr<double> AnalyzeBits(std::span<const Bit> ys,
                                   const BitSumParams& params) {
  if (absl::Status s = ValidateBitSumParams(params); !s.ok()) return s;
  if (static_cast<std::int64_t>(ys.size()) != params.n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "expected ", params.n, " messages, got ", ys.size()));
  }
  const auto ones = std::accumulate(ys.begin(), ys.end(), std::int64_t{0});
  const double n = static_cast<double>(params.n);
  return n / (n - params.lambda) * (static_cast<double>(ones) - params.lambda / 2);
}

absl::StatusOr<double> LambdaClosedForm(std::int64_t n,
                                        const PrivacyBudget& budget) {
  if (absl::Status s = ValidatePrivacyBudget(budget); !s.ok()) return s;
  const double log_term = std::log(4.0 / budget.delta);
  const double nd = static_cast<double>(n);
  if (nd < 14.0 * log_term) {
    return absl::FailedPreconditionError(absl::StrCat(
        "closed form needs n >= 14 ln(4/delta) = ", 14.0 * log_term,
        ", got n = ", n, "; use LambdaStar or relax the budget"));
  }
  const double eps_floor = std::sqrt(3456.0) * log_term / nd;
  if (!(budget.eps > eps_floor && budget.eps <= 1.0)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "closed form needs ", eps_floor, " < eps <= 1, got eps = ", budget.eps,
        "; use LambdaStar or relax the budget"));
  }
  if (budget.eps >= std::sqrt(192.0 * log_term / nd)) {
    return 64.0 / (budget.eps * budget.eps) * log_term;
  }
  return nd - budget.eps * std::pow(nd, 1.5) / std::sqrt(432.0 * log_term);
}

double MinProvableLambda(double delta) {
  return 14.0 * std::log(4.0 / delta);
}

absl::StatusOr<double> EpsilonOfLambda(std::int64_t n, double lambda,
                                       double delta) {
  if (!(delta > 0 && delta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must be in (0, 1), got ", delta));
  }
  const double floor = MinProvableLambda(delta);
  if (!(lambda >= floor)) {
    return absl::OutOfRangeError(absl::StrCat(
        "lambda = ", lambda, " is below 14 ln(4/delta) = ", floor));
  }
  if (!(lambda <= static_cast<double>(n))) {
    return absl::OutOfRangeError(
        absl::StrCat("lambda = ", lambda, " exceeds n = ", n));
  }
  const double effective =
      lambda - std::sqrt(2.0 * lambda * std::log(2.0 / delta));
  return std::sqrt(32.0 * std::log(4.0 / delta) / effective) *
         (1.0 - effective / static_cast<double>(n));
}

absl::StatusOr<double> LambdaStar(std::int64_t n, const PrivacyBudget& budget) {
  if (absl::Status s = ValidatePrivacyBudget(budget); !s.ok()) return s;
  const double nd = static_cast<double>(n);
  double lo = MinProvableLambda(budget.delta);
  double hi = nd;
  if (lo > hi) {
    return absl::FailedPreconditionError(absl::StrCat(
        "infeasible: n = ", n, " is below 14 ln(4/delta) = ", lo));
  }
  absl::StatusOr<double> eps_hi = EpsilonOfLambda(n, hi, budget.delta);
  if (!eps_hi.ok()) return eps_hi.status();
  if (*eps_hi > budget.eps) {
    return absl::FailedPreconditionError(absl::StrCat(
        "infeasible: even lambda = n gives provable eps = ", *eps_hi,
        " > ", budget.eps, " at n = ", n));
  }
  absl::StatusOr<double> eps_lo = EpsilonOfLambda(n, lo, budget.delta);
  if (!eps_lo.ok()) return eps_lo.status();
  if (*eps_lo <= budget.eps) return lo;

  // Invariant: eps*(lo) > eps >= eps*(hi).
  const double tolerance = 1e-6 * nd;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    absl::StatusOr<double> eps_mid = EpsilonOfLambda(n, mid, budget.delta);
    if (!eps_mid.ok()) return eps_mid.status();
    if (*eps_mid <= budget.eps) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

absl::StatusOr<double> BitSumAccuracyBound(std::int64_t n, double lambda,
                                           double beta) {
  if (!(beta > 0 && beta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("beta must be in (0, 1), got ", beta));
  }
  const double nd = static_cast<double>(n);
  const double log_term = std::log(2.0 / beta);
  if (!(lambda < nd && lambda >= 2.0 * log_term)) {
    return absl::OutOfRangeError(absl::StrCat(
        "accuracy bound needs n > lambda >= 2 ln(2/beta) = ", 2.0 * log_term,
        ", got n = ", n, ", lambda = ", lambda));
  }
  return std::sqrt(2.0 * lambda * log_term) * nd / (nd - lambda);
}

}  // namespace shuffledp
