#include "soar/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "soar/error.hpp"
#include "soar/gather.hpp"

namespace soar {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::string format_double(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

[[noreturn]] void config_error(const std::string& message) {
  throw Error(ErrorCode::kBadParams, message);
}

template <typename T>
T get_as(const json& doc, const std::string& key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    config_error("config key '" + key + "' has the wrong type");
  }
}

}  // namespace

std::string_view to_string(BudgetRule rule) {
  switch (rule) {
    case BudgetRule::kFixed: return "fixed";
    case BudgetRule::kFraction: return "fraction";
    case BudgetRule::kLogN: return "log_n";
    case BudgetRule::kSqrtN: return "sqrt_n";
  }
  return "unknown";
}

std::optional<BudgetRule> parse_budget_rule(std::string_view name) {
  for (auto r : {BudgetRule::kFixed, BudgetRule::kFraction, BudgetRule::kLogN, BudgetRule::kSqrtN}) {
    if (name == to_string(r)) return r;
  }
  return std::nullopt;
}

int resolve_budget(BudgetRule rule, int n, double fraction) {
  double k = 0.0;
  switch (rule) {
    case BudgetRule::kFixed: throw Error(ErrorCode::kInvalidArgument, "fixed budgets carry their own k");
    case BudgetRule::kFraction: k = fraction * n; break;
    case BudgetRule::kLogN: k = std::log2(static_cast<double>(n)); break;
    case BudgetRule::kSqrtN: k = std::sqrt(static_cast<double>(n)); break;
  }
  return std::max(1, static_cast<int>(std::lround(k)));
}

ScenarioConfig parse_scenario_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  if (!doc.is_object()) config_error("config must be a JSON object");

  ScenarioConfig c;
  for (const auto& [key, value] : doc.items()) {
    if (key == "topology") {
      const auto name = get_as<std::string>(doc, key);
      if (name == "complete_binary" || name == "btnet") {
        c.topology = TopologyKind::kCompleteBinary;
      } else if (name == "rpa" || name == "sfnet") {
        c.topology = TopologyKind::kRpa;
      } else if (name == "file") {
        c.topology = TopologyKind::kFile;
      } else {
        config_error("unknown topology '" + name + "'");
      }
    } else if (key == "n") {
      c.n = get_as<int>(doc, key);
    } else if (key == "topology_file") {
      c.topology_file = get_as<std::string>(doc, key);
    } else if (key == "loads") {
      const auto d = parse_load_distribution(get_as<std::string>(doc, key));
      if (!d) config_error("unknown load distribution");
      c.load_dist = *d;
    } else if (key == "rates") {
      const auto r = parse_rate_scheme(get_as<std::string>(doc, key));
      if (!r) config_error("unknown rate scheme");
      c.rate_scheme = *r;
    } else if (key == "k") {
      if (value.is_array()) {
        c.k_values = get_as<std::vector<int>>(doc, key);
      } else {
        c.k_values = {get_as<int>(doc, key)};
      }
    } else if (key == "k_rule") {
      const auto r = parse_budget_rule(get_as<std::string>(doc, key));
      if (!r) config_error("unknown k_rule");
      c.k_rule = *r;
    } else if (key == "k_fraction") {
      c.k_fraction = get_as<double>(doc, key);
    } else if (key == "strategies") {
      c.strategies.clear();
      for (const auto& name : get_as<std::vector<std::string>>(doc, key)) {
        const auto s = parse_strategy(name);
        if (!s) config_error("unknown strategy '" + name + "'");
        c.strategies.push_back(*s);
      }
    } else if (key == "use_case") {
      const auto u = parse_use_case(get_as<std::string>(doc, key));
      if (!u) config_error("unknown use case");
      c.use_case = *u;
    } else if (key == "corpus") {
      c.payload.corpus_path = get_as<std::string>(doc, key);
    } else if (key == "entry_bytes") {
      c.payload.entry_bytes = get_as<std::uint32_t>(doc, key);
    } else if (key == "vocabulary_size") {
      c.payload.vocabulary_size = get_as<std::uint32_t>(doc, key);
    } else if (key == "words_per_server") {
      c.payload.words_per_server = get_as<std::uint32_t>(doc, key);
    } else if (key == "zipf_exponent") {
      c.payload.zipf_exponent = get_as<double>(doc, key);
    } else if (key == "feature_count") {
      c.payload.feature_count = get_as<std::uint32_t>(doc, key);
    } else if (key == "dropout") {
      c.payload.dropout = get_as<double>(doc, key);
    } else if (key == "seed") {
      c.seed = get_as<std::uint64_t>(doc, key);
    } else if (key == "trials") {
      c.trials = get_as<int>(doc, key);
    } else {
      config_error("unknown config key '" + key + "'");
    }
  }

  if (c.topology == TopologyKind::kFile) {
    if (c.topology_file.empty()) config_error("topology 'file' needs 'topology_file'");
    if (!doc.contains("loads")) c.load_dist = LoadDistribution::kExplicit;
  }
  if (c.topology == TopologyKind::kRpa && !doc.contains("loads")) c.load_dist = LoadDistribution::kUnit;
  if (c.topology == TopologyKind::kRpa &&
      std::find(c.strategies.begin(), c.strategies.end(), StrategyKind::kLevel) != c.strategies.end()) {
    config_error("strategy 'level' needs a complete binary topology");
  }
  if (c.trials < 1) config_error("trials must be >= 1");
  if (c.k_rule == BudgetRule::kFixed) {
    if (c.k_values.empty()) config_error("no budgets given");
    for (int k : c.k_values) {
      if (k < 0) config_error("budgets must be >= 0");
    }
  }
  if (c.strategies.empty()) config_error("no strategies given");
  return c;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_config(buffer.str());
}

std::vector<int> config_budgets(const ScenarioConfig& config, int n) {
  if (config.k_rule == BudgetRule::kFixed) return config.k_values;
  return {resolve_budget(config.k_rule, n, config.k_fraction)};
}

TreeNetwork build_trial_network(const ScenarioConfig& config, std::uint64_t trial_seed) {
  TreeNetwork tree;
  switch (config.topology) {
    case TopologyKind::kCompleteBinary:
      tree = gen_complete_binary(config.n, config.rate_scheme);
      break;
    case TopologyKind::kRpa:
      tree = gen_rpa(config.n, derive_seed(trial_seed, 0));
      if (config.rate_scheme != RateScheme::kConstant) tree = apply_rate_scheme(tree, config.rate_scheme);
      break;
    case TopologyKind::kFile:
      tree = load_topology(config.topology_file);
      if (config.rate_scheme != RateScheme::kConstant) tree = apply_rate_scheme(tree, config.rate_scheme);
      break;
  }
  if (config.load_dist != LoadDistribution::kExplicit) {
    tree = tree.with_loads(gen_loads(tree, config.load_dist, derive_seed(trial_seed, 1)));
  }
  return tree;
}

std::vector<ExperimentRow> run_trial(const ScenarioConfig& config, int trial) {
  const std::uint64_t trial_seed = derive_seed(config.seed, static_cast<std::uint64_t>(trial));
  const TreeNetwork tree = build_trial_network(config, trial_seed);
  const int n = static_cast<int>(tree.size()) + 1;
  const PayloadModel payload =
      gen_payloads(tree, config.use_case, config.payload, derive_seed(trial_seed, 2));

  const double red_cost = simulate_reduce(tree, Placement{}).total;
  const auto red_bytes = simulate_bytes(tree, Placement{}, payload).total;

  std::vector<ExperimentRow> rows;
  for (StrategyKind strategy : config.strategies) {
    for (int k : config_budgets(config, n)) {
      const auto start = Clock::now();
      const Placement blue = place(strategy, tree, k);
      const double runtime = elapsed_ms(start);

      ExperimentRow row;
      row.strategy = std::string(to_string(strategy));
      row.n = n;
      row.k = k;
      row.seed = trial_seed;
      row.rate_scheme = std::string(to_string(config.rate_scheme));
      row.load_dist = std::string(to_string(config.load_dist));
      row.use_case = std::string(to_string(config.use_case));
      row.utilization = simulate_reduce(tree, blue).total;
      row.normalized_vs_allred = red_cost > 0.0 ? row.utilization / red_cost : 1.0;
      row.bytes = simulate_bytes(tree, blue, payload).total;
      row.bytes_normalized =
          red_bytes > 0 ? static_cast<double>(row.bytes) / static_cast<double>(red_bytes) : 1.0;
      row.runtime_ms = runtime;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<SummaryCell> summarize(const std::vector<ExperimentRow>& rows) {
  std::vector<SummaryCell> cells;
  std::vector<std::vector<const ExperimentRow*>> members;
  for (const auto& row : rows) {
    auto it = std::find_if(cells.begin(), cells.end(), [&](const SummaryCell& c) {
      return c.strategy == row.strategy && c.k == row.k;
    });
    if (it == cells.end()) {
      cells.push_back({row.strategy, row.k});
      members.emplace_back();
      it = cells.end() - 1;
    }
    members[static_cast<std::size_t>(it - cells.begin())].push_back(&row);
  }
  const auto mean_sd = [](const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    return std::pair{mean, sd};
  };
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<double> norm;
    std::vector<double> bytes;
    for (const auto* r : members[c]) {
      norm.push_back(r->normalized_vs_allred);
      bytes.push_back(r->bytes_normalized);
    }
    cells[c].count = norm.size();
    std::tie(cells[c].mean_normalized, cells[c].sd_normalized) = mean_sd(norm);
    std::tie(cells[c].mean_bytes_normalized, cells[c].sd_bytes_normalized) = mean_sd(bytes);
  }
  return cells;
}

void write_experiment_header(std::ostream& out) {
  out << "strategy,n,k,seed,rate_scheme,load_dist,use_case,utilization,normalized_vs_allred,"
         "bytes,bytes_normalized,runtime_ms\n";
}

void write_experiment_row(std::ostream& out, const ExperimentRow& row) {
  out << row.strategy << ',' << row.n << ',' << row.k << ',' << row.seed << ',' << row.rate_scheme
      << ',' << row.load_dist << ',' << row.use_case << ',' << format_double(row.utilization) << ','
      << format_double(row.normalized_vs_allred) << ',' << row.bytes << ','
      << format_double(row.bytes_normalized) << ',' << format_double(row.runtime_ms) << '\n';
}

std::vector<ExperimentRow> read_experiment_csv(std::istream& in) {
  std::vector<ExperimentRow> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() != 12) throw Error(ErrorCode::kParseError, "experiment row has " + std::to_string(f.size()) + " fields");
    const auto num = [](const std::string& s, auto& out) {
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
      if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error(ErrorCode::kParseError, "bad number '" + s + "'");
      }
    };
    ExperimentRow r;
    r.strategy = f[0];
    num(f[1], r.n);
    num(f[2], r.k);
    num(f[3], r.seed);
    r.rate_scheme = f[4];
    r.load_dist = f[5];
    r.use_case = f[6];
    num(f[7], r.utilization);
    num(f[8], r.normalized_vs_allred);
    num(f[9], r.bytes);
    num(f[10], r.bytes_normalized);
    num(f[11], r.runtime_ms);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryCell>& summary) {
  out << "strategy,k,count,mean_normalized,sd_normalized,mean_bytes_normalized,sd_bytes_normalized\n";
  for (const auto& c : summary) {
    out << c.strategy << ',' << c.k << ',' << c.count << ',' << format_double(c.mean_normalized)
        << ',' << format_double(c.sd_normalized) << ',' << format_double(c.mean_bytes_normalized)
        << ',' << format_double(c.sd_bytes_normalized) << '\n';
  }
}

ExperimentOutcome run_experiment(const ScenarioConfig& config, std::ostream& csv) {
  const int trials = config.trials;
  std::vector<std::vector<ExperimentRow>> per_trial(static_cast<std::size_t>(trials));
  std::vector<std::string> errors(static_cast<std::size_t>(trials));

#if defined(SOAR_USE_OPENMP)
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (int t = 0; t < trials; ++t) {
    try {
      per_trial[static_cast<std::size_t>(t)] = run_trial(config, t);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(t)] = e.what();
    }
  }

  ExperimentOutcome outcome;
  write_experiment_header(csv);
  for (int t = 0; t < trials; ++t) {
    const auto& error = errors[static_cast<std::size_t>(t)];
    if (!error.empty()) {
      csv << "# error in trial " << t << ": " << error << '\n';
      outcome.error = error;
      break;
    }
    for (const auto& row : per_trial[static_cast<std::size_t>(t)]) {
      write_experiment_row(csv, row);
      outcome.rows.push_back(row);
    }
  }
  csv.flush();
  outcome.summary = summarize(outcome.rows);
  return outcome;
}

BudgetForReduction min_budget_for_reduction(const TreeNetwork& tree, double reduction) {
  if (!(reduction >= 0.0 && reduction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "reduction must be in [0, 1)");
  }
  const auto limit = static_cast<int>(tree.available_count());
  int budget = 1;
  while (true) {
    const int k = std::min(budget, limit);
    const auto costs = optimal_costs(tree, k);
    const double red = costs.front();
    const double target = (1.0 - reduction) * red;
    for (int i = 0; i <= k; ++i) {
      if (costs[static_cast<std::size_t>(i)] <= target) {
        return {i, red > 0.0 ? costs[static_cast<std::size_t>(i)] / red : 1.0};
      }
    }
    if (k == limit) return {k, red > 0.0 ? costs.back() / red : 1.0};
    budget *= 2;
  }
}

std::vector<ScalingRow> run_scaling(const ScalingConfig& config) {
  for (int n : config.sizes) {
    if (n > kScalingMaxSize) {
      throw Error(ErrorCode::kBadParams, "scaling size " + std::to_string(n) + " exceeds " +
                                             std::to_string(kScalingMaxSize));
    }
  }
  struct Job {
    int n;
    int trial;
  };
  std::vector<Job> jobs;
  for (int n : config.sizes) {
    for (int t = 0; t < config.trials; ++t) jobs.push_back({n, t});
  }
  std::vector<std::vector<ScalingRow>> out(jobs.size());

#if defined(SOAR_USE_OPENMP)
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const auto [n, trial] = jobs[j];
    const std::uint64_t seed =
        derive_seed(derive_seed(config.seed, static_cast<std::uint64_t>(n)), static_cast<std::uint64_t>(trial));
    TreeNetwork tree = config.topology == TopologyKind::kRpa ? gen_rpa(n, seed) : gen_complete_binary(n);
    if (config.topology != TopologyKind::kRpa) {
      tree = tree.with_loads(gen_loads(tree, LoadDistribution::kPowerLaw, derive_seed(seed, 1)));
    }
    const double switches = static_cast<double>(tree.size());

    int widest = 0;
    for (BudgetRule rule : config.rules) widest = std::max(widest, resolve_budget(rule, n));
    const auto costs = optimal_costs(tree, widest);
    for (BudgetRule rule : config.rules) {
      const int k = resolve_budget(rule, n);
      const double red = costs.front();
      out[j].push_back({"budget", n, std::string(to_string(rule)), trial, k,
                        red > 0.0 ? costs[static_cast<std::size_t>(k)] / red : 1.0, k / switches});
    }
    for (double reduction : config.reductions) {
      const auto found = min_budget_for_reduction(tree, reduction);
      out[j].push_back({"reduction", n, format_double(reduction), trial, found.k, found.normalized,
                        found.k / switches});
    }
  }

  std::vector<ScalingRow> rows;
  for (auto& part : out) rows.insert(rows.end(), part.begin(), part.end());
  return rows;
}

void write_scaling_csv(std::ostream& out, const std::vector<ScalingRow>& rows) {
  out << "kind,n,label,trial,k,normalized,blue_fraction\n";
  for (const auto& r : rows) {
    out << r.kind << ',' << r.n << ',' << r.label << ',' << r.trial << ',' << r.k << ','
        << format_double(r.normalized) << ',' << format_double(r.blue_fraction) << '\n';
  }
}

TimingSample time_solver(const TreeNetwork& tree, int k, int repeats, bool include_parallel) {
  std::vector<double> gather_ms;
  std::vector<double> color_ms;
  std::vector<double> parallel_ms;
  for (int r = 0; r < std::max(repeats, 1); ++r) {
    auto start = Clock::now();
    const GatherTables tables = gather(tree, k);
    gather_ms.push_back(elapsed_ms(start));
    start = Clock::now();
    const Placement blue = color(tree, tables, k);
    color_ms.push_back(elapsed_ms(start));
    if (include_parallel) {
      start = Clock::now();
      const GatherTables again = gather_parallel(tree, k);
      parallel_ms.push_back(elapsed_ms(start));
    }
  }
  return {median(gather_ms), median(color_ms), median(parallel_ms)};
}

std::vector<BenchRow> run_bench(const BenchConfig& config) {
  std::vector<BenchRow> rows;
  for (int n : config.sizes) {
    TreeNetwork tree = gen_complete_binary(n);
    tree = tree.with_loads(gen_loads(tree, LoadDistribution::kPowerLaw,
                                     derive_seed(config.seed, static_cast<std::uint64_t>(n))));
    for (int k : config.k_values) rows.push_back({n, k, time_solver(tree, k, config.repeats)});
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "n,k,gather_ms,color_ms,gather_parallel_ms\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.k << ',' << format_double(r.median.gather_ms) << ','
        << format_double(r.median.color_ms) << ',' << format_double(r.median.gather_parallel_ms) << '\n';
  }
}

}  // namespace soar
