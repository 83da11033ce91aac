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

#include "shuffledp/experiment.h"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "json.hpp"
#include "shuffledp/applications.h"
#include "shuffledp/bitsum.h"
#include "shuffledp/composition.h"
#include "shuffledp/parallel.h"
#include "shuffledp/protocol.h"
#include "shuffledp/realsum.h"
#include "shuffledp/shuffler.h"

namespace shuffledp::cli {
namespace {

using Json = nlohmann::ordered_json;

// Streams derived from the user seed.
constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kTrialStream = 2;

std::string Num(double v) { return absl::StrFormat("%.17g", v); }

Json OptionalNumber(const std::optional<double>& v) {
  return v.has_value() && std::isfinite(*v) ? Json(*v) : Json(nullptr);
}

// Dataset for one simulated application, fixed across trials.
struct Workload {
  std::optional<BitDataset> bits;
  std::optional<RealDataset> reals;
  std::optional<CategoricalDataset> categories;
  std::optional<BinaryMatrixDataset> matrix;
};

Workload MakeWorkload(const ExperimentConfig& config) {
  RandomSource rng = RandomSource(config.seed).Stream(kDataStream);
  Workload w;
  switch (config.app) {
    case App::kBitSum: {
      std::vector<Bit> bits(config.n);
      for (Bit& b : bits) b = rng.Bernoulli(config.ones_fraction) ? 1 : 0;
      w.bits = *BitDataset::Create(std::move(bits));
      break;
    }
    case App::kRealSum: {
      std::vector<double> values(config.n);
      for (double& v : values) v = rng.UniformDouble();
      w.reals = *RealDataset::Create(std::move(values));
      break;
    }
    case App::kHistogram: {
      std::vector<int> values(config.n);
      for (int& v : values) {
        v = static_cast<int>(rng.UniformInt(config.domain_size));
      }
      w.categories =
          *CategoricalDataset::Create(std::move(values), config.domain_size);
      break;
    }
    case App::kSelection:
      w.matrix = MakePlantedSelectionData(config.n, config.columns,
                                          config.columns / 2, 0.3,
                                          config.planted_margin, rng);
      break;
  }
  return w;
}

struct ResolvedParams {
  double lambda = 0;
  std::optional<int> rounds;
  std::optional<double> alpha;
  double beta_allowed = 0;
};

absl::StatusOr<double> BitSumLambda(const ExperimentConfig& config) {
  if (config.lambda.has_value()) return *config.lambda;
  const PrivacyBudget budget{config.eps, config.delta};
  return config.lambda_rule == LambdaRule::kClosed
             ? LambdaClosedForm(config.n, budget)
             : LambdaStar(config.n, budget);
}

absl::StatusOr<ResolvedParams> Resolve(const ExperimentConfig& config) {
  const PrivacyBudget budget{config.eps, config.delta};
  ResolvedParams out;
  out.beta_allowed = config.beta;
  switch (config.app) {
    case App::kBitSum: {
      absl::StatusOr<double> lambda = BitSumLambda(config);
      if (!lambda.ok()) return lambda.status();
      out.lambda = *lambda;
      if (auto alpha = BitSumAccuracyBound(config.n, out.lambda, config.beta);
          alpha.ok()) {
        out.alpha = *alpha;
      }
      break;
    }
    case App::kRealSum: {
      if (config.lambda.has_value()) {
        out.lambda = *config.lambda;
        out.rounds = config.rounds.value_or(1);
      } else {
        absl::StatusOr<RealSumPlan> plan =
            PlanRealSum(config.n, budget, RealSumOptions{config.rounds});
        if (!plan.ok()) return plan.status();
        out.lambda = plan->params.lambda;
        out.rounds = plan->params.rounds;
      }
      if (auto alpha = RealSumAccuracyBound(
              {config.n, out.lambda, *out.rounds}, config.beta);
          alpha.ok()) {
        out.alpha = *alpha;
      }
      out.beta_allowed = 2 * config.beta;
      break;
    }
    case App::kHistogram: {
      if (config.lambda.has_value()) {
        out.lambda = *config.lambda;
      } else {
        absl::StatusOr<double> lambda = HistogramLambda(config.n, budget);
        if (!lambda.ok()) return lambda.status();
        out.lambda = *lambda;
      }
      out.alpha = static_cast<double>(config.n) / 10.0;
      break;
    }
    case App::kSelection: {
      if (config.lambda.has_value()) {
        out.lambda = *config.lambda;
      } else {
        absl::StatusOr<SelectionPlan> plan =
            PlanSelection(config.n, config.columns, budget);
        if (!plan.ok()) return plan.status();
        out.lambda = plan->lambda;
      }
      out.alpha = static_cast<double>(config.n) / 10.0;
      break;
    }
  }
  if (!(out.lambda >= 0 && out.lambda < static_cast<double>(config.n))) {
    return absl::InvalidArgumentError(
        absl::StrCat("lambda must be in [0, n), got ", out.lambda));
  }
  return out;
}

// Runs one trial; fills true_value, estimate and abs_error.
absl::Status RunTrial(const ExperimentConfig& config,
                      const ResolvedParams& params, const Workload& w,
                      const RandomSource& rng, TrialRecord& record) {
  switch (config.app) {
    case App::kBitSum: {
      const BitSumParams p{config.n, params.lambda};
      auto run = RunProtocol(BitSumRandomizer(p), BitSumAnalyzer(p),
                             w.bits->bits(), rng);
      if (!run.ok()) return run.status();
      record.true_value = static_cast<double>(w.bits->Sum());
      record.estimate = run->estimate;
      break;
    }
    case App::kRealSum: {
      const RealSumParams p{config.n, params.lambda, *params.rounds};
      auto run = RunProtocol(RealSumRandomizer(p), RealSumAnalyzer(p),
                             w.reals->values(), rng);
      if (!run.ok()) return run.status();
      record.true_value = w.reals->Sum();
      record.estimate = run->estimate;
      break;
    }
    case App::kHistogram: {
      auto v = HistogramProtocol(*w.categories, {config.eps, config.delta},
                                 rng, HistogramOptions{params.lambda});
      if (!v.ok()) return v.status();
      record.true_value = 0;
      record.estimate = (*v - w.categories->Histogram()).cwiseAbs().maxCoeff();
      break;
    }
    case App::kSelection: {
      auto j = SelectionProtocol(*w.matrix, {config.eps, config.delta}, rng,
                                 SelectionOptions{params.lambda});
      if (!j.ok()) return j.status();
      const Eigen::VectorXd sums = w.matrix->ColumnSums();
      record.true_value = sums.maxCoeff();
      record.estimate = sums[*j];
      break;
    }
  }
  record.abs_error = std::abs(record.estimate - record.true_value);
  return absl::OkStatus();
}

bool IsFailure(App app, double abs_error, double alpha) {
  // Real-sum bound is stated for errors >= alpha, the others for > alpha.
  return app == App::kRealSum ? abs_error >= alpha : abs_error > alpha;
}

absl::Status WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) return absl::UnavailableError("cannot open " + path);
  file << contents;
  file.close();
  if (!file) return absl::DataLossError("failed writing " + path);
  return absl::OkStatus();
}

Json ReportJsonObject(const DPReport& report) {
  Json j;
  j["eps_tested"] = report.eps_tested;
  j["delta_measured"] = report.delta_measured;
  j["delta_allowed"] = report.delta_allowed;
  j["worst_pair"] = {{"from_k", report.worst_pair.from_k},
                     {"to_k", report.worst_pair.to_k}};
  if (report.eps_measured.has_value()) {
    j["eps_measured"] = std::isfinite(*report.eps_measured)
                            ? Json(*report.eps_measured)
                            : Json("inf");
  }
  j["pass"] = report.pass;
  return j;
}

void PrintReport(const Json& report, bool as_json, std::ostream& out) {
  if (as_json) {
    out << report.dump() << "\n";
    return;
  }
  for (const auto& [key, value] : report.items()) {
    out << key << ": ";
    if (value.is_number_float()) {
      out << Num(value.get<double>());
    } else if (value.is_string()) {
      out << value.get<std::string>();
    } else {
      out << value.dump();
    }
    out << "\n";
  }
}

// ---------------------------------------------------------------------------
// params
// ---------------------------------------------------------------------------

absl::StatusOr<Json> ParamsReport(const ExperimentConfig& c) {
  const PrivacyBudget budget{c.eps, c.delta};
  if (absl::Status s = ValidatePrivacyBudget(budget); !s.ok()) return s;
  if (c.n < 1) return absl::InvalidArgumentError("n must be at least 1");
  Json r;
  r["app"] = std::string(AppName(c.app));
  r["n"] = c.n;
  r["eps"] = c.eps;
  r["delta"] = c.delta;
  r["beta"] = c.beta;
  const double log_n = std::log(static_cast<double>(c.n));
  switch (c.app) {
    case App::kBitSum: {
      absl::StatusOr<double> star = LambdaStar(c.n, budget);
      if (!star.ok()) return star.status();
      absl::StatusOr<double> closed = LambdaClosedForm(c.n, budget);
      r["lambda_closed_form"] = closed.ok() ? Json(*closed) : Json(nullptr);
      if (!closed.ok()) {
        r["lambda_closed_form_note"] = std::string(closed.status().message());
      }
      r["lambda_star"] = *star;
      r["eps_of_lambda_star"] = *EpsilonOfLambda(c.n, *star, c.delta);
      if (closed.ok()) {
        auto bound = BitSumAccuracyBound(c.n, *closed, c.beta);
        r["accuracy_bound_closed_form"] =
            bound.ok() ? Json(*bound) : Json(nullptr);
      }
      auto bound = BitSumAccuracyBound(c.n, *star, c.beta);
      r["accuracy_bound_star"] = bound.ok() ? Json(*bound) : Json(nullptr);
      auto local = VerifyRandomizerLocalDp(c.n, *star, c.eps + log_n);
      if (!local.ok()) return local.status();
      r["randomizer_local_eps"] = OptionalNumber(local->eps_measured);
      r["randomizer_local_eps_bound"] = c.eps + log_n;
      r["randomizer_local_within_bound"] = local->pass;
      break;
    }
    case App::kRealSum: {
      absl::StatusOr<RealSumPlan> plan =
          PlanRealSum(c.n, budget, RealSumOptions{c.rounds});
      if (!plan.ok()) return plan.status();
      r["rounds"] = plan->params.rounds;
      r["eps0"] = plan->eps0;
      r["delta0"] = plan->delta0;
      r["lambda"] = plan->params.lambda;
      const double realized =
          *EpsilonOfLambda(c.n, plan->params.lambda, plan->delta0);
      r["eps0_realized"] = realized;
      auto composed = Compose(realized, plan->delta0, plan->params.rounds,
                              c.delta / 2);
      if (composed.ok()) {
        r["composed_eps"] = composed->eps;
        r["composed_delta"] = composed->delta;
      }
      auto bound = RealSumAccuracyBound(plan->params, c.beta);
      r["accuracy_bound"] = bound.ok() ? Json(*bound) : Json(nullptr);
      r["accuracy_failure_probability"] = 2 * c.beta;
      break;
    }
    case App::kHistogram: {
      absl::StatusOr<double> lambda = HistogramLambda(c.n, budget);
      if (!lambda.ok()) return lambda.status();
      r["D"] = c.domain_size;
      r["round_eps"] = c.eps / 2;
      r["round_delta"] = c.delta / 2;
      r["lambda"] = *lambda;
      auto bound = BitSumAccuracyBound(c.n, *lambda, c.beta);
      r["per_bucket_accuracy_bound"] = bound.ok() ? Json(*bound) : Json(nullptr);
      break;
    }
    case App::kSelection: {
      absl::StatusOr<SelectionPlan> plan = PlanSelection(c.n, c.columns, budget);
      if (!plan.ok()) return plan.status();
      r["d"] = c.columns;
      r["eps0"] = plan->round_budget.eps0;
      r["delta0"] = plan->round_budget.delta0;
      r["delta_prime"] = plan->round_budget.delta_prime;
      auto composed = Compose(plan->round_budget.eps0, plan->round_budget.delta0,
                              c.columns, plan->round_budget.delta_prime);
      r["composed_eps"] = composed->eps;
      r["composed_delta"] = composed->delta;
      r["lambda"] = plan->lambda;
      auto bound = BitSumAccuracyBound(c.n, plan->lambda, c.beta);
      r["per_column_accuracy_bound"] = bound.ok() ? Json(*bound) : Json(nullptr);
      break;
    }
  }
  return r;
}

int CmdParams(const ExperimentConfig& config, bool as_json, std::ostream& out,
              std::ostream& err) {
  absl::StatusOr<Json> report = ParamsReport(config);
  if (!report.ok()) {
    err << "params: " << report.status().message() << "\n";
    return kExitUsage;
  }
  PrintReport(*report, as_json, out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int CmdSimulate(const ExperimentConfig& config, std::ostream& out,
                std::ostream& err) {
  if (absl::Status s = ValidateConfig(config); !s.ok()) {
    err << "simulate: " << s.message() << "\n";
    return kExitUsage;
  }
  absl::StatusOr<SimulationResult> result = Simulate(config);
  if (!result.ok()) {
    err << "simulate: " << result.status().message() << "\n";
    return kExitUsage;
  }
  const std::string summary = SummaryToJson(config, result->summary);
  if (absl::Status s = WriteFile(config.out, TrialsToCsv(result->records));
      !s.ok()) {
    err << "simulate: " << s.message() << "\n";
    return kExitUsage;
  }
  if (absl::Status s = WriteFile(config.out + ".summary.json", summary + "\n");
      !s.ok()) {
    err << "simulate: " << s.message() << "\n";
    return kExitUsage;
  }
  out << summary << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyRequest {
  std::string mode = "shuffled";
  std::int64_t n = 100;
  std::optional<double> lambda;
  double eps = 1.0;
  double delta = 1e-6;
  std::optional<std::int64_t> k;
  std::int64_t trials = 100000;
  std::uint64_t seed = 1;
  std::int64_t max_n = 2000;
};

constexpr double kEquivalenceLevel = 1e-3;

int CmdVerify(const VerifyRequest& req, std::ostream& out, std::ostream& err) {
  double lambda = 0;
  if (req.lambda.has_value()) {
    lambda = *req.lambda;
  } else {
    absl::StatusOr<double> star = LambdaStar(req.n, {req.eps, req.delta});
    if (!star.ok()) {
      err << "verify: no --lambda given and " << star.status().message()
          << "\n";
      return kExitUsage;
    }
    lambda = *star;
  }
  Json j;
  j["mode"] = req.mode;
  j["n"] = req.n;
  j["lambda"] = lambda;
  bool pass = false;
  if (req.mode == "shuffled") {
    VerifyOptions options;
    options.max_n = req.max_n;
    absl::StatusOr<DPReport> report =
        VerifyShuffledDp(req.n, lambda, {req.eps, req.delta}, options);
    if (!report.ok()) {
      err << "verify: " << report.status().message() << "\n";
      return kExitUsage;
    }
    j.update(ReportJsonObject(*report));
    pass = report->pass;
  } else if (req.mode == "local") {
    absl::StatusOr<DPReport> report =
        VerifyRandomizerLocalDp(req.n, lambda, req.eps);
    if (!report.ok()) {
      err << "verify: " << report.status().message() << "\n";
      return kExitUsage;
    }
    j.update(ReportJsonObject(*report));
    pass = report->pass;
  } else if (req.mode == "equivalence") {
    const std::int64_t k = req.k.value_or(req.n / 2);
    absl::StatusOr<ChiSquareResult> chi = EmpiricalEquivalenceTest(
        req.n, lambda, k, req.trials, RandomSource(req.seed));
    if (!chi.ok()) {
      err << "verify: " << chi.status().message() << "\n";
      return kExitUsage;
    }
    j["k"] = k;
    j["trials"] = req.trials;
    j["statistic"] = chi->statistic;
    j["degrees_of_freedom"] = chi->degrees_of_freedom;
    j["p_value"] = chi->p_value;
    j["level"] = kEquivalenceLevel;
    pass = chi->p_value > kEquivalenceLevel;
    j["pass"] = pass;
  } else {
    err << "verify: unknown mode '" << req.mode
        << "' (expected shuffled, local or equivalence)\n";
    return kExitUsage;
  }
  out << j.dump() << "\n";
  return pass ? kExitOk : kExitVerificationFailed;
}

}  // namespace

absl::StatusOr<App> ParseApp(std::string_view name) {
  if (name == "bitsum") return App::kBitSum;
  if (name == "realsum") return App::kRealSum;
  if (name == "histogram") return App::kHistogram;
  if (name == "selection") return App::kSelection;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown app '", std::string(name), "' (bitsum, realsum, histogram, selection)"));
}

std::string_view AppName(App app) {
  switch (app) {
    case App::kBitSum:
      return "bitsum";
    case App::kRealSum:
      return "realsum";
    case App::kHistogram:
      return "histogram";
    case App::kSelection:
      return "selection";
  }
  return "unknown";
}

absl::StatusOr<LambdaRule> ParseLambdaRule(std::string_view name) {
  if (name == "star") return LambdaRule::kStar;
  if (name == "closed") return LambdaRule::kClosed;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown lambda rule '", std::string(name), "' (star, closed)"));
}

absl::Status ValidateConfig(const ExperimentConfig& c) {
  if (c.n < 1) return absl::InvalidArgumentError("n must be positive");
  if (absl::Status s = ValidatePrivacyBudget({c.eps, c.delta}); !s.ok()) {
    return s;
  }
  if (c.trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  if (c.domain_size < 2) return absl::InvalidArgumentError("D must be >= 2");
  if (c.columns < 1) return absl::InvalidArgumentError("d must be >= 1");
  if (c.rounds.has_value() && *c.rounds < 1) {
    return absl::InvalidArgumentError("rounds must be >= 1");
  }
  if (!(c.beta > 0 && c.beta < 1)) {
    return absl::InvalidArgumentError("beta must be in (0, 1)");
  }
  if (!(c.ones_fraction >= 0 && c.ones_fraction <= 1)) {
    return absl::InvalidArgumentError("ones fraction must be in [0, 1]");
  }
  if (!(c.planted_margin >= 0 && c.planted_margin <= 0.7)) {
    return absl::InvalidArgumentError("planted margin must be in [0, 0.7]");
  }
  if (c.threads < 0) return absl::InvalidArgumentError("threads must be >= 0");
  return absl::OkStatus();
}

absl::Status ApplyJsonConfig(std::string_view json_text,
                             ExperimentConfig& config) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("config is not valid JSON: ", e.what()));
  }
  if (!j.is_object()) {
    return absl::InvalidArgumentError("config must be a JSON object");
  }
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "app") {
        absl::StatusOr<App> app = ParseApp(value.get<std::string>());
        if (!app.ok()) return app.status();
        config.app = *app;
      } else if (key == "n") {
        config.n = value.get<std::int64_t>();
      } else if (key == "eps") {
        config.eps = value.get<double>();
      } else if (key == "delta") {
        config.delta = value.get<double>();
      } else if (key == "trials") {
        config.trials = value.get<std::int64_t>();
      } else if (key == "seed") {
        config.seed = value.get<std::uint64_t>();
      } else if (key == "D") {
        config.domain_size = value.get<int>();
      } else if (key == "d") {
        config.columns = value.get<int>();
      } else if (key == "rounds") {
        config.rounds = value.get<int>();
      } else if (key == "lambda") {
        config.lambda = value.get<double>();
      } else if (key == "lambda_rule") {
        absl::StatusOr<LambdaRule> rule =
            ParseLambdaRule(value.get<std::string>());
        if (!rule.ok()) return rule.status();
        config.lambda_rule = *rule;
      } else if (key == "beta") {
        config.beta = value.get<double>();
      } else if (key == "ones_fraction") {
        config.ones_fraction = value.get<double>();
      } else if (key == "planted_margin") {
        config.planted_margin = value.get<double>();
      } else if (key == "out") {
        config.out = value.get<std::string>();
      } else if (key == "threads") {
        config.threads = value.get<int>();
      } else if (key == "timing") {
        config.timing = value.get<bool>();
      } else {
        return absl::InvalidArgumentError(
            absl::StrCat("unknown config key '", key, "'"));
      }
    }
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("config has a value of the wrong type: ", e.what()));
  }
  return absl::OkStatus();
}

BinaryMatrixDataset MakePlantedSelectionData(std::int64_t n, int columns,
                                             int planted, double base,
                                             double margin, RandomSource rng) {
  BitMatrix rows = BitMatrix::Zero(n, columns);
  std::vector<std::int64_t> order(n);
  for (int j = 0; j < columns; ++j) {
    const double fraction = j == planted ? base + margin : base;
    const auto ones = static_cast<std::int64_t>(
        std::llround(std::clamp(fraction, 0.0, 1.0) * static_cast<double>(n)));
    for (std::int64_t i = 0; i < n; ++i) order[i] = i;
    ShuffleInPlace(std::span<std::int64_t>(order), rng);
    for (std::int64_t i = 0; i < ones; ++i) rows(order[i], j) = 1;
  }
  return *BinaryMatrixDataset::Create(std::move(rows));
}

absl::StatusOr<SimulationResult> Simulate(const ExperimentConfig& config) {
  if (absl::Status s = ValidateConfig(config); !s.ok()) return s;
  absl::StatusOr<ResolvedParams> params = Resolve(config);
  if (!params.ok()) return params.status();
  const Workload workload = MakeWorkload(config);

  SimulationResult result;
  result.records.resize(config.trials);
  std::vector<absl::Status> statuses(config.trials);
  const RandomSource trial_seeds = RandomSource(config.seed).Stream(kTrialStream);
  const int threads = config.threads > 0 ? config.threads : DefaultThreadCount();
  ParallelFor(config.trials, threads, [&](std::int64_t t) {
    TrialRecord& record = result.records[t];
    record.trial = t;
    RandomSource seed_source = trial_seeds.Stream(t);
    record.seed = seed_source();
    const auto start = std::chrono::steady_clock::now();
    statuses[t] = RunTrial(config, *params, workload,
                           RandomSource(record.seed), record);
    if (config.timing) {
      record.runtime_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start)
                              .count();
    }
  });
  for (const absl::Status& s : statuses) {
    if (!s.ok()) return s;
  }

  SimulationSummary& summary = result.summary;
  summary.lambda = params->lambda;
  summary.rounds = params->rounds;
  summary.alpha = params->alpha;
  summary.beta_allowed = params->beta_allowed;
  double abs_sum = 0, sq_sum = 0, est_sum = 0, true_sum = 0;
  std::int64_t failures = 0;
  for (const TrialRecord& r : result.records) {
    abs_sum += r.abs_error;
    sq_sum += r.abs_error * r.abs_error;
    est_sum += r.estimate;
    true_sum += r.true_value;
    if (params->alpha.has_value() &&
        IsFailure(config.app, r.abs_error, *params->alpha)) {
      ++failures;
    }
  }
  const double trials = static_cast<double>(config.trials);
  summary.mean_abs_error = abs_sum / trials;
  summary.rmse = std::sqrt(sq_sum / trials);
  summary.mean_estimate = est_sum / trials;
  summary.mean_true_value = true_sum / trials;
  if (params->alpha.has_value()) {
    summary.empirical_beta = static_cast<double>(failures) / trials;
    summary.pass = *summary.empirical_beta <= summary.beta_allowed;
  }
  return result;
}

std::string TrialsToCsv(std::span<const TrialRecord> records) {
  std::string csv = "trial,seed,true_value,estimate,abs_error,runtime_ms\n";
  for (const TrialRecord& r : records) {
    absl::StrAppend(&csv, r.trial, ",", r.seed, ",", Num(r.true_value), ",",
                    Num(r.estimate), ",", Num(r.abs_error), ",",
                    Num(r.runtime_ms), "\n");
  }
  return csv;
}

std::string SummaryToJson(const ExperimentConfig& config,
                          const SimulationSummary& s) {
  Json j;
  j["app"] = std::string(AppName(config.app));
  j["n"] = config.n;
  j["eps"] = config.eps;
  j["delta"] = config.delta;
  j["trials"] = config.trials;
  j["seed"] = config.seed;
  j["lambda"] = s.lambda;
  if (s.rounds.has_value()) j["rounds"] = *s.rounds;
  j["beta"] = config.beta;
  j["alpha"] = OptionalNumber(s.alpha);
  j["mean_abs_error"] = s.mean_abs_error;
  j["rmse"] = s.rmse;
  j["mean_estimate"] = s.mean_estimate;
  j["mean_true_value"] = s.mean_true_value;
  j["empirical_beta"] = OptionalNumber(s.empirical_beta);
  j["beta_allowed"] = s.beta_allowed;
  j["pass"] = s.pass.has_value() ? Json(*s.pass) : Json(nullptr);
  return j.dump();
}

std::string ReportToJson(const DPReport& report) {
  return ReportJsonObject(report).dump();
}

int RunCli(std::span<const std::string> args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Differentially private protocols in the shuffled model", "shuffledp"};
  app.require_subcommand(1);

  ExperimentConfig config;
  std::string app_name = "bitsum";
  std::string lambda_rule = "star";
  std::string config_path;
  bool as_json = false;
  double lambda = 0;
  int rounds = 0;

  auto add_budget = [&](CLI::App* sub) {
    sub->add_option("--n", config.n, "Number of users");
    sub->add_option("--eps", config.eps, "Privacy parameter epsilon");
    sub->add_option("--delta", config.delta, "Privacy parameter delta");
  };

  CLI::App* params = app.add_subcommand("params", "Privacy parameter report");
  add_budget(params);
  params->add_option("--app", app_name, "bitsum|realsum|histogram|selection");
  params->add_option("--beta", config.beta, "Accuracy failure probability");
  params->add_option("--D", config.domain_size, "Histogram domain size");
  params->add_option("--d", config.columns, "Selection column count");
  params->add_option("--rounds", rounds, "Real-sum rounds override");
  params->add_flag("--json", as_json, "Emit JSON");

  CLI::App* simulate = app.add_subcommand("simulate", "Monte-Carlo trials");
  simulate->add_option("--config", config_path, "JSON config (flags win)");
  add_budget(simulate);
  simulate->add_option("--app", app_name, "bitsum|realsum|histogram|selection");
  simulate->add_option("--trials", config.trials, "Number of trials");
  simulate->add_option("--seed", config.seed, "Base seed");
  simulate->add_option("--out", config.out, "CSV output path");
  simulate->add_option("--D", config.domain_size, "Histogram domain size");
  simulate->add_option("--d", config.columns, "Selection column count");
  simulate->add_option("--rounds", rounds, "Real-sum rounds override");
  simulate->add_option("--lambda", lambda, "Lambda override");
  simulate->add_option("--lambda-rule", lambda_rule, "star|closed");
  simulate->add_option("--beta", config.beta, "Accuracy failure probability");
  simulate->add_option("--ones-fraction", config.ones_fraction,
                       "Bit-sum data: fraction of ones");
  simulate->add_option("--planted-margin", config.planted_margin,
                       "Selection data: planted column margin / n");
  simulate->add_option("--threads", config.threads,
                       "Worker threads (default: SHUFFLEDP_THREADS or all)");
  simulate->add_flag("--timing", config.timing, "Record per-trial runtime");
  simulate->add_flag("--json", as_json, "Accepted for symmetry; summary is JSON");

  VerifyRequest verify_req;
  double verify_lambda = 0;
  std::int64_t verify_k = 0;
  CLI::App* verify = app.add_subcommand("verify", "Exact DP verification");
  verify->add_option("--mode", verify_req.mode, "shuffled|local|equivalence");
  verify->add_option("--n", verify_req.n, "Number of users");
  verify->add_option("--lambda", verify_lambda,
                     "Lambda (default: lambda_star for --eps/--delta)");
  verify->add_option("--eps", verify_req.eps, "Epsilon to test");
  verify->add_option("--delta", verify_req.delta, "Allowed delta");
  verify->add_option("--k", verify_k, "Equivalence: number of ones");
  verify->add_option("--trials", verify_req.trials, "Equivalence: trials");
  verify->add_option("--seed", verify_req.seed, "Equivalence: seed");
  verify->add_option("--max-n", verify_req.max_n, "Exact-check size guard");
  verify->add_flag("--json", as_json, "Accepted for symmetry; output is JSON");

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (verify->parsed()) {
    if (verify->count("--lambda") > 0) verify_req.lambda = verify_lambda;
    if (verify->count("--k") > 0) verify_req.k = verify_k;
    return CmdVerify(verify_req, out, err);
  }

  CLI::App* active = params->parsed() ? params : simulate;
  if (simulate->parsed() && !config_path.empty()) {
    std::ifstream file(config_path);
    if (!file) {
      err << "cannot read config " << config_path << "\n";
      return kExitUsage;
    }
    std::stringstream buffer;
    buffer << file.rdbuf();
    // Flags win: re-apply the explicitly given ones after the file.
    ExperimentConfig from_flags = config;
    if (absl::Status s = ApplyJsonConfig(buffer.str(), config); !s.ok()) {
      err << s.message() << "\n";
      return kExitUsage;
    }
    auto given = [&](const char* flag) { return active->count(flag) > 0; };
    if (given("--n")) config.n = from_flags.n;
    if (given("--eps")) config.eps = from_flags.eps;
    if (given("--delta")) config.delta = from_flags.delta;
    if (given("--trials")) config.trials = from_flags.trials;
    if (given("--seed")) config.seed = from_flags.seed;
    if (given("--out")) config.out = from_flags.out;
    if (given("--D")) config.domain_size = from_flags.domain_size;
    if (given("--d")) config.columns = from_flags.columns;
    if (given("--beta")) config.beta = from_flags.beta;
    if (given("--ones-fraction")) config.ones_fraction = from_flags.ones_fraction;
    if (given("--planted-margin")) {
      config.planted_margin = from_flags.planted_margin;
    }
    if (given("--threads")) config.threads = from_flags.threads;
    if (given("--timing")) config.timing = from_flags.timing;
    if (active->count("--app") == 0) app_name = std::string(AppName(config.app));
    if (active->count("--lambda-rule") == 0) {
      lambda_rule = config.lambda_rule == LambdaRule::kClosed ? "closed" : "star";
    }
  }
  absl::StatusOr<App> parsed_app = ParseApp(app_name);
  if (!parsed_app.ok()) {
    err << parsed_app.status().message() << "\n";
    return kExitUsage;
  }
  config.app = *parsed_app;
  if (active->count("--rounds") > 0) config.rounds = rounds;

  if (params->parsed()) return CmdParams(config, as_json, out, err);

  absl::StatusOr<LambdaRule> rule = ParseLambdaRule(lambda_rule);
  if (!rule.ok()) {
    err << rule.status().message() << "\n";
    return kExitUsage;
  }
  config.lambda_rule = *rule;
  if (simulate->count("--lambda") > 0) config.lambda = lambda;
  return CmdSimulate(config, out, err);
}

}  // namespace shuffledp::cli
