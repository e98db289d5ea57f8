#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "soar/scenario.hpp"
#include "soar/strategies.hpp"

namespace soar {

enum class TopologyKind { kCompleteBinary, kRpa, kFile };

enum class BudgetRule { kFixed, kFraction, kLogN, kSqrtN };

std::string_view to_string(BudgetRule rule);
std::optional<BudgetRule> parse_budget_rule(std::string_view name);

/// k for a network of n nodes (destination included): max(1, round(f(n))).
int resolve_budget(BudgetRule rule, int n, double fraction = 0.01);

struct ScenarioConfig {
  TopologyKind topology = TopologyKind::kCompleteBinary;
  int n = 256;
  std::string topology_file;
  LoadDistribution load_dist = LoadDistribution::kPowerLaw;
  RateScheme rate_scheme = RateScheme::kConstant;
  BudgetRule k_rule = BudgetRule::kFixed;
  std::vector<int> k_values{1, 2, 4, 8, 16, 32};
  double k_fraction = 0.01;
  std::vector<StrategyKind> strategies{StrategyKind::kSoar, StrategyKind::kTop, StrategyKind::kMax,
                                       StrategyKind::kLevel, StrategyKind::kAllBlue};
  UseCase use_case = UseCase::kNone;
  PayloadParams payload;
  std::uint64_t seed = 1;
  int trials = 10;
};

/// Parses the JSON mirror of ScenarioConfig; unknown keys are rejected.
ScenarioConfig parse_scenario_config(const std::string& text);
ScenarioConfig load_scenario_config(const std::string& path);

/// Budgets the config asks for, given the generated network size.
std::vector<int> config_budgets(const ScenarioConfig& config, int n);

/// Network for one trial, loads and rates applied.
TreeNetwork build_trial_network(const ScenarioConfig& config, std::uint64_t trial_seed);

struct ExperimentRow {
  std::string strategy;
  int n = 0;
  int k = 0;
  std::uint64_t seed = 0;
  std::string rate_scheme;
  std::string load_dist;
  std::string use_case;
  double utilization = 0.0;
  double normalized_vs_allred = 1.0;
  std::uint64_t bytes = 0;
  double bytes_normalized = 1.0;
  double runtime_ms = 0.0;

  friend bool operator==(const ExperimentRow&, const ExperimentRow&) = default;
};

/// Every (strategy, k) row of one trial.
std::vector<ExperimentRow> run_trial(const ScenarioConfig& config, int trial);

struct SummaryCell {
  std::string strategy;
  int k = 0;
  std::size_t count = 0;
  double mean_normalized = 0.0;
  double sd_normalized = 0.0;
  double mean_bytes_normalized = 0.0;
  double sd_bytes_normalized = 0.0;
};

/// Per-(strategy, k) means and sample standard deviations, in first-seen order.
std::vector<SummaryCell> summarize(const std::vector<ExperimentRow>& rows);

struct ExperimentOutcome {
  std::vector<ExperimentRow> rows;
  std::vector<SummaryCell> summary;
  std::optional<std::string> error;  // first failing trial, if any
};

/// Runs all trials (in parallel when built with OpenMP) and streams rows to
/// `csv` in trial order. If a trial fails, the rows of earlier trials are
/// written, followed by an error row, and the outcome carries the message.
ExperimentOutcome run_experiment(const ScenarioConfig& config, std::ostream& csv);

void write_experiment_header(std::ostream& out);
void write_experiment_row(std::ostream& out, const ExperimentRow& row);
std::vector<ExperimentRow> read_experiment_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const std::vector<SummaryCell>& summary);

// ---- scaling ----

struct ScalingConfig {
  std::vector<int> sizes{256, 512, 1024, 2048, 4096};
  std::vector<BudgetRule> rules{BudgetRule::kFraction, BudgetRule::kLogN, BudgetRule::kSqrtN};
  std::vector<double> reductions{0.3, 0.5, 0.7};
  TopologyKind topology = TopologyKind::kCompleteBinary;
  int trials = 10;
  std::uint64_t seed = 1;
};

inline constexpr int kScalingMaxSize = 1 << 13;

struct ScalingRow {
  std::string kind;   // "budget" or "reduction"
  int n = 0;
  std::string label;  // rule name or target reduction
  int trial = 0;
  int k = 0;
  double normalized = 1.0;
  double blue_fraction = 0.0;
};

struct BudgetForReduction {
  int k = 0;
  double normalized = 1.0;
};

/// Smallest k whose optimum is at most (1 - reduction) of the all-red cost.
/// Gathers with doubling budgets and reads the answer off the root row.
BudgetForReduction min_budget_for_reduction(const TreeNetwork& tree, double reduction);

std::vector<ScalingRow> run_scaling(const ScalingConfig& config);
void write_scaling_csv(std::ostream& out, const std::vector<ScalingRow>& rows);

// ---- runtime ----

struct TimingSample {
  double gather_ms = 0.0;
  double color_ms = 0.0;
  double gather_parallel_ms = 0.0;
};

/// Median wall time of gather and color (and the parallel gather when
/// `include_parallel`) over `repeats` runs.
TimingSample time_solver(const TreeNetwork& tree, int k, int repeats, bool include_parallel = true);

struct BenchConfig {
  std::vector<int> sizes{256, 512, 1024, 2048};
  std::vector<int> k_values{4, 8, 16, 32, 64, 128};
  int repeats = 3;
  std::uint64_t seed = 1;
};

struct BenchRow {
  int n = 0;
  int k = 0;
  TimingSample median;
};

std::vector<BenchRow> run_bench(const BenchConfig& config);
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace soar
