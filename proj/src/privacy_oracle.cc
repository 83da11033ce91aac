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

#include "shuffledp/privacy_oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "absl/strings/str_cat.h"
#include "shuffledp/bitsum.h"
#include "shuffledp/parallel.h"
#include "shuffledp/shuffler.h"

namespace shuffledp {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kNormalizationTolerance = 1e-10;

// ln(i!) for i in [0, n].
std::vector<double> LogFactorials(std::int64_t n) {
  std::vector<double> table(n + 1);
  for (std::int64_t i = 0; i <= n; ++i) {
    table[i] = std::lgamma(static_cast<double>(i) + 1.0);
  }
  return table;
}

double LogChoose(const std::vector<double>& lf, std::int64_t n,
                 std::int64_t k) {
  return lf[n] - lf[k] - lf[n - k];
}

// ln Bin(n, p)(k), exact at p in {0, 1}.
double LogBinomialPmf(const std::vector<double>& lf, std::int64_t n, double p,
                      std::int64_t k) {
  if (p <= 0.0) return k == 0 ? 0.0 : kNegInf;
  if (p >= 1.0) return k == n ? 0.0 : kNegInf;
  return LogChoose(lf, n, k) + static_cast<double>(k) * std::log(p) +
         static_cast<double>(n - k) * std::log1p(-p);
}

Eigen::VectorXd BinomialPmf(const std::vector<double>& lf, std::int64_t n,
                            double p) {
  Eigen::VectorXd out(n + 1);
  for (std::int64_t k = 0; k <= n; ++k) {
    out[k] = std::exp(LogBinomialPmf(lf, n, p, k));
  }
  return out;
}

absl::Status ValidateOracleInputs(std::int64_t k, std::int64_t n,
                                  double lambda) {
  if (n < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("n must be at least 1, got ", n));
  }
  if (k < 0 || k > n) {
    return absl::OutOfRangeError(
        absl::StrCat("k = ", k, " is outside [0, ", n, "]"));
  }
  if (!(lambda >= 0 && lambda <= static_cast<double>(n))) {
    return absl::InvalidArgumentError(
        absl::StrCat("lambda must be in [0, n], got ", lambda));
  }
  return absl::OkStatus();
}

absl::StatusOr<DiscretePMF> PmfByRoute(PmfRoute route, std::int64_t k,
                                       std::int64_t n, double lambda) {
  return route == PmfRoute::kMixture ? CLambdaPmf(k, n, lambda)
                                     : ShuffledSumPmf(k, n, lambda);
}

absl::Status ValidateVerifyInputs(std::int64_t n, double lambda,
                                  const VerifyOptions& options) {
  if (n > options.max_n) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "exact verification is limited to n <= ", options.max_n, ", got ", n));
  }
  return ValidateOracleInputs(0, n, lambda);
}

// Output laws for k = 0..n ones.
absl::StatusOr<std::vector<DiscretePMF>> AllPmfs(std::int64_t n, double lambda,
                                                 PmfRoute route) {
  std::vector<DiscretePMF> pmfs;
  pmfs.reserve(n + 1);
  for (std::int64_t k = 0; k <= n; ++k) {
    absl::StatusOr<DiscretePMF> pmf = PmfByRoute(route, k, n, lambda);
    if (!pmf.ok()) return pmf.status();
    pmfs.push_back(*std::move(pmf));
  }
  return pmfs;
}

struct WorstDelta {
  double delta = 0;
  NeighborPair pair;
};

WorstDelta ScanNeighbors(const std::vector<DiscretePMF>& pmfs, double eps) {
  WorstDelta worst{-1.0, {}};
  for (std::size_t k = 0; k + 1 < pmfs.size(); ++k) {
    const auto kk = static_cast<std::int64_t>(k);
    const double up = *HockeyStick(pmfs[k + 1], pmfs[k], eps);
    const double down = *HockeyStick(pmfs[k], pmfs[k + 1], eps);
    if (up > worst.delta) worst = {up, {kk + 1, kk}};
    if (down > worst.delta) worst = {down, {kk, kk + 1}};
  }
  worst.delta = std::max(worst.delta, 0.0);
  return worst;
}

}  // namespace

absl::StatusOr<DiscretePMF> DiscretePMF::Create(Eigen::VectorXd probs) {
  if (probs.size() == 0) {
    return absl::InvalidArgumentError("pmf needs at least one outcome");
  }
  if (!probs.allFinite() || (probs.array() < 0.0).any()) {
    return absl::InvalidArgumentError("pmf has a negative or non-finite entry");
  }
  const double total = probs.sum();
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    return absl::InvalidArgumentError(
        absl::StrCat("pmf sums to ", total, ", not 1"));
  }
  return DiscretePMF(std::move(probs));
}

double DiscretePMF::Mean() const {
  return probs_.dot(Eigen::VectorXd::LinSpaced(size(), 0.0, size() - 1.0));
}

absl::StatusOr<DiscretePMF> CLambdaPmf(std::int64_t k, std::int64_t n,
                                       double lambda) {
  if (absl::Status s = ValidateOracleInputs(k, n, lambda); !s.ok()) return s;
  const std::vector<double> lf = LogFactorials(n);
  const double replace_prob = lambda / static_cast<double>(n);
  const double log_half = std::log(0.5);
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(n + 1);
  std::vector<double> coin(n + 1);
  for (std::int64_t s = 0; s <= n; ++s) {
    const double log_size = LogBinomialPmf(lf, n, replace_prob, s);
    if (log_size == kNegInf) continue;
    for (std::int64_t b = 0; b <= s; ++b) {
      coin[b] = std::exp(LogChoose(lf, s, b) + static_cast<double>(s) * log_half);
    }
    // h ones fall inside the replaced set H, k - h survive.
    const std::int64_t h_lo = std::max<std::int64_t>(0, s - (n - k));
    const std::int64_t h_hi = std::min(k, s);
    for (std::int64_t h = h_lo; h <= h_hi; ++h) {
      const double weight =
          std::exp(log_size + LogChoose(lf, k, h) +
                   LogChoose(lf, n - k, s - h) - LogChoose(lf, n, s));
      if (weight == 0.0) continue;
      const std::int64_t kept = k - h;
      for (std::int64_t b = 0; b <= s; ++b) {
        probs[kept + b] += weight * coin[b];
      }
    }
  }
  return DiscretePMF::Create(std::move(probs));
}

absl::StatusOr<DiscretePMF> ShuffledSumPmf(std::int64_t k, std::int64_t n,
                                           double lambda) {
  if (absl::Status s = ValidateOracleInputs(k, n, lambda); !s.ok()) return s;
  const std::vector<double> lf = LogFactorials(n);
  const double flip = lambda / (2.0 * static_cast<double>(n));
  const Eigen::VectorXd from_ones = BinomialPmf(lf, k, 1.0 - flip);
  const Eigen::VectorXd from_zeros = BinomialPmf(lf, n - k, flip);
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(n + 1);
  for (std::int64_t a = 0; a <= k; ++a) {
    if (from_ones[a] == 0.0) continue;
    probs.segment(a, n - k + 1) += from_ones[a] * from_zeros;
  }
  return DiscretePMF::Create(std::move(probs));
}

absl::StatusOr<double> HockeyStick(const DiscretePMF& p, const DiscretePMF& q,
                                   double eps) {
  if (p.size() != q.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "support mismatch: ", p.size(), " vs ", q.size(), " outcomes"));
  }
  if (std::isnan(eps)) return absl::InvalidArgumentError("eps is NaN");
  const double scale = std::exp(eps);
  double delta = 0.0;
  for (std::int64_t t = 0; t < p.size(); ++t) {
    if (p[t] == 0.0) continue;
    const double excess = q[t] == 0.0 ? p[t] : p[t] - scale * q[t];
    if (excess > 0.0) delta += excess;
  }
  return std::clamp(delta, 0.0, 1.0);
}

absl::StatusOr<DPReport> VerifyShuffledDp(std::int64_t n, double lambda,
                                          const PrivacyBudget& budget,
                                          const VerifyOptions& options) {
  if (absl::Status s = ValidateVerifyInputs(n, lambda, options); !s.ok()) {
    return s;
  }
  if (!(budget.eps >= 0) || !(budget.delta >= 0 && budget.delta < 1)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "need eps >= 0 and delta in [0, 1), got (", budget.eps, ", ",
        budget.delta, ")"));
  }
  DPReport report;
  report.eps_tested = budget.eps;
  report.delta_allowed = budget.delta;
  absl::StatusOr<std::vector<DiscretePMF>> pmfs =
      AllPmfs(n, lambda, options.route);
  if (!pmfs.ok()) return pmfs.status();
  const WorstDelta worst = ScanNeighbors(*pmfs, budget.eps);
  report.delta_measured = worst.delta;
  report.worst_pair = worst.pair;
  report.pass = report.delta_measured <= report.delta_allowed;
  return report;
}

absl::StatusOr<double> TightEpsilon(std::int64_t n, double lambda,
                                    double delta,
                                    const VerifyOptions& options) {
  if (absl::Status s = ValidateVerifyInputs(n, lambda, options); !s.ok()) {
    return s;
  }
  if (!(delta >= 0 && delta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must be in [0, 1), got ", delta));
  }
  absl::StatusOr<std::vector<DiscretePMF>> pmfs =
      AllPmfs(n, lambda, options.route);
  if (!pmfs.ok()) return pmfs.status();
  auto ok_at = [&](double eps) {
    return ScanNeighbors(*pmfs, eps).delta <= delta;
  };
  if (ok_at(0.0)) return 0.0;
  double hi = 1.0;
  while (!ok_at(hi)) {
    hi *= 2.0;
    if (hi > 1e3) return std::numeric_limits<double>::infinity();
  }
  double lo = 0.0;
  while (hi - lo > 1e-9 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (ok_at(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

DPReport VerifyBinaryRandomizerLocalDp(double p_one_given_one,
                                       double p_one_given_zero,
                                       double eps_target) {
  Eigen::Vector2d given_one(1.0 - p_one_given_one, p_one_given_one);
  Eigen::Vector2d given_zero(1.0 - p_one_given_zero, p_one_given_zero);
  // Both are valid two-point laws by construction.
  const DiscretePMF law_one = *DiscretePMF::Create(given_one);
  const DiscretePMF law_zero = *DiscretePMF::Create(given_zero);

  DPReport report;
  report.eps_tested = eps_target;
  report.delta_allowed = 0.0;
  const double up = *HockeyStick(law_one, law_zero, eps_target);
  const double down = *HockeyStick(law_zero, law_one, eps_target);
  report.delta_measured = std::max(up, down);
  report.worst_pair = up >= down ? NeighborPair{1, 0} : NeighborPair{0, 1};

  double worst_log_ratio = 0.0;
  for (int t = 0; t < 2; ++t) {
    const double a = given_one[t];
    const double b = given_zero[t];
    if (a == 0.0 && b == 0.0) continue;
    if (a == 0.0 || b == 0.0) {
      worst_log_ratio = std::numeric_limits<double>::infinity();
      break;
    }
    worst_log_ratio = std::max(worst_log_ratio, std::abs(std::log(a / b)));
  }
  report.eps_measured = worst_log_ratio;
  report.pass = report.delta_measured <= report.delta_allowed;
  return report;
}

absl::StatusOr<DPReport> VerifyRandomizerLocalDp(std::int64_t n, double lambda,
                                                 double eps_target) {
  if (n < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("n must be at least 1, got ", n));
  }
  if (!(lambda >= 0 && lambda <= static_cast<double>(n))) {
    return absl::InvalidArgumentError(
        absl::StrCat("lambda must be in [0, n], got ", lambda));
  }
  if (!(eps_target >= 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps target must be non-negative, got ", eps_target));
  }
  const double flip = lambda / (2.0 * static_cast<double>(n));
  DPReport report = VerifyBinaryRandomizerLocalDp(1.0 - flip, flip, eps_target);
  if (lambda > 0) {
    // Closed form of the worst likelihood ratio, free of cancellation.
    report.eps_measured =
        std::log(2.0 * static_cast<double>(n) / lambda - 1.0);
  }
  return report;
}

absl::StatusOr<ChiSquareResult> ChiSquareGoodnessOfFit(
    std::span<const std::int64_t> counts, const DiscretePMF& pmf,
    double min_expected) {
  if (static_cast<std::int64_t>(counts.size()) != pmf.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "have ", counts.size(), " count bins but ", pmf.size(), " outcomes"));
  }
  const double total = static_cast<double>(
      std::accumulate(counts.begin(), counts.end(), std::int64_t{0}));
  if (total <= 0) return absl::InvalidArgumentError("no observations");

  std::vector<double> observed;
  std::vector<double> expected;
  double obs_acc = 0.0;
  double exp_acc = 0.0;
  for (std::int64_t t = 0; t < pmf.size(); ++t) {
    obs_acc += static_cast<double>(counts[t]);
    exp_acc += total * pmf[t];
    if (exp_acc >= min_expected) {
      observed.push_back(obs_acc);
      expected.push_back(exp_acc);
      obs_acc = exp_acc = 0.0;
    }
  }
  if (obs_acc > 0.0 || exp_acc > 0.0) {
    if (observed.empty()) {
      observed.push_back(obs_acc);
      expected.push_back(exp_acc);
    } else {
      observed.back() += obs_acc;
      expected.back() += exp_acc;
    }
  }

  ChiSquareResult result;
  result.degrees_of_freedom = static_cast<int>(observed.size()) - 1;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] == 0.0) {
      if (observed[i] > 0.0) {
        result.statistic = std::numeric_limits<double>::infinity();
        break;
      }
      continue;
    }
    const double diff = observed[i] - expected[i];
    result.statistic += diff * diff / expected[i];
  }
  if (result.degrees_of_freedom <= 0) {
    result.p_value = result.statistic == 0.0 ? 1.0 : 0.0;
  } else if (std::isinf(result.statistic)) {
    result.p_value = 0.0;
  } else {
    result.p_value = boost::math::gamma_q(
        0.5 * result.degrees_of_freedom, 0.5 * result.statistic);
  }
  return result;
}

absl::StatusOr<ChiSquareResult> EmpiricalEquivalenceTest(
    std::int64_t n, double lambda, std::int64_t k, std::int64_t trials,
    const RandomSource& rng, std::optional<std::int64_t> oracle_k) {
  if (trials < 100000) {
    return absl::InvalidArgumentError(
        absl::StrCat("need at least 1e5 trials, got ", trials));
  }
  const BitSumParams params{n, lambda};
  if (absl::Status s = ValidateBitSumParams(params); !s.ok()) return s;
  if (absl::Status s = ValidateOracleInputs(k, n, lambda); !s.ok()) return s;
  absl::StatusOr<DiscretePMF> reference =
      CLambdaPmf(oracle_k.value_or(k), n, lambda);
  if (!reference.ok()) return reference.status();

  std::vector<Bit> data(n, 0);
  std::fill(data.begin(), data.begin() + k, Bit{1});
  RandomSource layout_rng = rng.Stream(0);
  ShuffleInPlace(std::span<Bit>(data), layout_rng);

  constexpr std::int64_t kBlocks = 64;
  std::vector<std::vector<std::int64_t>> block_counts(
      kBlocks, std::vector<std::int64_t>(n + 1, 0));
  const RandomSource trial_root = rng.Stream(1);
  ParallelFor(kBlocks, DefaultThreadCount(), [&](std::int64_t block) {
    std::vector<std::int64_t>& counts = block_counts[block];
    const std::int64_t begin = trials * block / kBlocks;
    const std::int64_t end = trials * (block + 1) / kBlocks;
    for (std::int64_t t = begin; t < end; ++t) {
      RandomSource trial_rng = trial_root.Stream(t);
      std::int64_t sum = 0;
      for (Bit x : data) sum += RandomizeBit(x, params, trial_rng);
      ++counts[sum];
    }
  });
  std::vector<std::int64_t> counts(n + 1, 0);
  for (const auto& block : block_counts) {
    for (std::int64_t t = 0; t <= n; ++t) counts[t] += block[t];
  }
  return ChiSquareGoodnessOfFit(counts, *reference);
}

PmfSampler::PmfSampler(const DiscretePMF& pmf) : cdf_(pmf.size()) {
  double acc = 0.0;
  for (std::int64_t t = 0; t < pmf.size(); ++t) {
    acc += pmf[t];
    cdf_[t] = acc;
  }
  cdf_.back() = 1.0;
}

std::int64_t PmfSampler::operator()(RandomSource& rng) const {
  const double u = rng.UniformDouble();
  return std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin();
}

}  // namespace shuffledp
