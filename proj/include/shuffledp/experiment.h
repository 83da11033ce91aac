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

#ifndef SHUFFLEDP_EXPERIMENT_H_
#define SHUFFLEDP_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "shuffledp/datasets.h"
#include "shuffledp/privacy_oracle.h"
#include "shuffledp/random.h"

namespace shuffledp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;

enum class App { kBitSum, kRealSum, kHistogram, kSelection };
enum class LambdaRule { kStar, kClosed };

absl::StatusOr<App> ParseApp(std::string_view name);
std::string_view AppName(App app);
absl::StatusOr<LambdaRule> ParseLambdaRule(std::string_view name);

struct ExperimentConfig {
  App app = App::kBitSum;
  std::int64_t n = 10000;
  double eps = 1.0;
  double delta = 1e-6;
  std::int64_t trials = 100;
  std::uint64_t seed = 1;
  // Histogram domain size D.
  int domain_size = 32;
  // Selection column count d.
  int columns = 16;
  // Real-sum round count override.
  std::optional<int> rounds;
  std::optional<double> lambda;
  LambdaRule lambda_rule = LambdaRule::kStar;
  double beta = 0.05;
  // Bit-sum data: fraction of users holding a one.
  double ones_fraction = 0.5;
  // Selection data: the planted column's sum exceeds the others by this
  // fraction of n.
  double planted_margin = 0.2;
  std::string out = "trials.csv";
  // 0 picks DefaultThreadCount().
  int threads = 0;
  // Record wall-clock time per trial. Off keeps the CSV byte-identical.
  bool timing = false;
};

absl::Status ValidateConfig(const ExperimentConfig& config);

// Overwrites the fields present in a JSON object; unknown keys are errors.
absl::Status ApplyJsonConfig(std::string_view json_text,
                             ExperimentConfig& config);

struct TrialRecord {
  std::int64_t trial = 0;
  std::uint64_t seed = 0;
  double true_value = 0;
  double estimate = 0;
  double abs_error = 0;
  double runtime_ms = 0;
};

struct SimulationSummary {
  double lambda = 0;
  std::optional<int> rounds;
  std::optional<double> alpha;
  double mean_abs_error = 0;
  double rmse = 0;
  double mean_estimate = 0;
  double mean_true_value = 0;
  std::optional<double> empirical_beta;
  double beta_allowed = 0;
  std::optional<bool> pass;
};

struct SimulationResult {
  std::vector<TrialRecord> records;
  SimulationSummary summary;
};

// Runs config.trials independent protocol executions on a dataset derived
// from config.seed. Trial t uses its own derived seed, so the records do not
// depend on the thread count.
absl::StatusOr<SimulationResult> Simulate(const ExperimentConfig& config);

std::string TrialsToCsv(std::span<const TrialRecord> records);
std::string SummaryToJson(const ExperimentConfig& config,
                          const SimulationSummary& summary);
std::string ReportToJson(const DPReport& report);

// Selection data with exact column sums: every column has round(base n) ones
// except `planted`, which has round(base n + margin n), at random rows.
BinaryMatrixDataset MakePlantedSelectionData(std::int64_t n, int columns,
                                             int planted, double base,
                                             double margin, RandomSource rng);

// Full command-line entry point: params | simulate | verify.
int RunCli(std::span<const std::string> args, std::ostream& out,
           std::ostream& err);

}  // namespace shuffledp::cli

#endif  // SHUFFLEDP_EXPERIMENT_H_
