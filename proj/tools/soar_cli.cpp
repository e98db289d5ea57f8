#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "soar/error.hpp"
#include "soar/experiment.hpp"
#include "soar/gather.hpp"
#include "soar/reduce.hpp"
#include "soar/scenario.hpp"
#include "soar/strategies.hpp"
#include "soar/topology.hpp"

using namespace soar;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOutOfRangeDistance:
    case ErrorCode::kPayloadCountMismatch:
    case ErrorCode::kTableMismatch:
    case ErrorCode::kInstanceTooLarge:
      return kExitRuntime;
    default:
      return kExitConfig;
  }
}

template <typename Enum, typename Parse>
Enum parse_or_throw(const std::string& text, Parse parse, const char* what) {
  const auto v = parse(text);
  if (!v) throw Error(ErrorCode::kBadParams, std::string("unknown ") + what + " '" + text + "'");
  return *v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// Writes to --out when given, else stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error(ErrorCode::kIoError, "cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct Options {
  std::string topology;
  int k = 0;
  std::string strategy = "soar";
  std::uint64_t seed = 1;
  int trials = 10;
  std::string rates;
  std::string loads;
  std::string use_case = "none";
  std::string corpus;
  std::string out;
  std::string config;
  std::string placement;
  int n = 256;
  std::vector<int> sizes;
  std::vector<int> k_values;
  int repeats = 3;
  std::string dump_tables;
};

TreeNetwork generated_or_file(const Options& o) {
  if (o.topology == "btnet" || o.topology == "complete_binary") {
    TreeNetwork t = gen_complete_binary(o.n);
    return t.with_loads(gen_loads(t, LoadDistribution::kPowerLaw, derive_seed(o.seed, 1)));
  }
  if (o.topology == "rpa" || o.topology == "sfnet") return gen_rpa(o.n, derive_seed(o.seed, 0));
  return load_topology(o.topology);
}

/// --rates / --loads given on the command line override the file contents.
TreeNetwork apply_overrides(TreeNetwork tree, const Options& o) {
  if (!o.rates.empty()) {
    tree = apply_rate_scheme(tree, parse_or_throw<RateScheme>(o.rates, parse_rate_scheme, "rate scheme"));
  }
  if (!o.loads.empty()) {
    const auto dist = parse_or_throw<LoadDistribution>(o.loads, parse_load_distribution, "load distribution");
    tree = tree.with_loads(gen_loads(tree, dist, derive_seed(o.seed, 1)));
  }
  return tree;
}

int cmd_solve(const Options& o) {
  const TreeNetwork tree = apply_overrides(generated_or_file(o), o);
  const auto kind = parse_or_throw<StrategyKind>(o.strategy, parse_strategy, "strategy");
  Placement blue;
  double cost = 0.0;
  if (kind == StrategyKind::kSoar) {
    const SolveResult r = solve(tree, o.k, {.keep_tables = !o.dump_tables.empty()});
    blue = r.placement;
    cost = r.cost;
    if (!o.dump_tables.empty()) {
      Sink tables(o.dump_tables);
      write_tables_csv(tables.stream(), tree, *r.tables);
    }
  } else {
    blue = place(kind, tree, o.k);
  }
  const EdgeUtilization util = simulate_reduce(tree, blue);
  if (kind != StrategyKind::kSoar) cost = util.total;

  std::cout << "strategy: " << to_string(kind) << '\n' << "k: " << o.k << '\n' << "blue:";
  for (const auto& id : blue.ids(tree)) std::cout << ' ' << id;
  std::cout << '\n' << "cost: " << cost << '\n';
  Sink edges(o.out);
  write_edge_csv(edges.stream(), tree, util);
  return 0;
}

int cmd_simulate(const Options& o) {
  const TreeNetwork tree = apply_overrides(generated_or_file(o), o);
  const auto ids = split_list(o.placement);
  const Placement blue = Placement::from_ids(tree, ids);
  PayloadParams params;
  if (!o.corpus.empty()) params.corpus_path = o.corpus;
  const auto use = parse_or_throw<UseCase>(o.use_case, parse_use_case, "use case");
  const PayloadModel model = gen_payloads(tree, use, params, derive_seed(o.seed, 2));
  const EdgeUtilization util = simulate_reduce(tree, blue);
  const ByteUtilization bytes = simulate_bytes(tree, blue, model);
  const double red = simulate_reduce(tree, Placement{}).total;
  std::cout << "cost: " << util.total << '\n'
            << "normalized: " << (red > 0 ? util.total / red : 1.0) << '\n'
            << "bytes: " << bytes.total << '\n';
  Sink edges(o.out);
  write_edge_csv(edges.stream(), tree, util, &bytes);
  return 0;
}

ScenarioConfig experiment_config(const Options& o, const CLI::App& sub) {
  ScenarioConfig c = o.config.empty() ? ScenarioConfig{} : load_scenario_config(o.config);
  if (sub.count("--topology")) {
    if (o.topology == "btnet" || o.topology == "complete_binary") {
      c.topology = TopologyKind::kCompleteBinary;
    } else if (o.topology == "rpa" || o.topology == "sfnet") {
      c.topology = TopologyKind::kRpa;
      if (!sub.count("--loads")) c.load_dist = LoadDistribution::kUnit;
      std::erase(c.strategies, StrategyKind::kLevel);
    } else {
      c.topology = TopologyKind::kFile;
      c.topology_file = o.topology;
      if (!sub.count("--loads")) c.load_dist = LoadDistribution::kExplicit;
      std::erase(c.strategies, StrategyKind::kLevel);
    }
  }
  if (sub.count("--n")) c.n = o.n;
  if (sub.count("--k-values")) {
    c.k_rule = BudgetRule::kFixed;
    c.k_values = o.k_values;
  }
  if (sub.count("--k")) {
    c.k_rule = BudgetRule::kFixed;
    c.k_values = {o.k};
  }
  if (sub.count("--strategy")) {
    c.strategies.clear();
    for (const auto& s : split_list(o.strategy)) {
      c.strategies.push_back(parse_or_throw<StrategyKind>(s, parse_strategy, "strategy"));
    }
  }
  if (sub.count("--seed")) c.seed = o.seed;
  if (sub.count("--trials")) c.trials = o.trials;
  if (sub.count("--rates")) c.rate_scheme = parse_or_throw<RateScheme>(o.rates, parse_rate_scheme, "rate scheme");
  if (sub.count("--loads")) {
    c.load_dist = parse_or_throw<LoadDistribution>(o.loads, parse_load_distribution, "load distribution");
  }
  if (sub.count("--use-case")) c.use_case = parse_or_throw<UseCase>(o.use_case, parse_use_case, "use case");
  if (sub.count("--corpus")) c.payload.corpus_path = o.corpus;
  if (c.trials < 1) throw Error(ErrorCode::kBadParams, "trials must be >= 1");
  return c;
}

int cmd_experiment(const Options& o, const CLI::App& sub) {
  const ScenarioConfig c = experiment_config(o, sub);
  Sink rows(o.out);
  const ExperimentOutcome outcome = run_experiment(c, rows.stream());
  if (o.out.empty()) {
    std::ostringstream summary;
    write_summary_csv(summary, outcome.summary);
    std::string line;
    std::istringstream lines(summary.str());
    while (std::getline(lines, line)) std::cout << "# " << line << '\n';
  } else {
    Sink summary(o.out + ".summary.csv");
    write_summary_csv(summary.stream(), outcome.summary);
  }
  if (outcome.error) {
    std::cerr << "error: " << *outcome.error << '\n';
    return kExitRuntime;
  }
  return 0;
}

int cmd_scaling(const Options& o, const CLI::App& sub) {
  ScalingConfig c;
  if (!o.sizes.empty()) c.sizes = o.sizes;
  if (sub.count("--trials")) c.trials = o.trials;
  if (sub.count("--seed")) c.seed = o.seed;
  if (o.topology == "rpa" || o.topology == "sfnet") c.topology = TopologyKind::kRpa;
  if (c.trials < 1) throw Error(ErrorCode::kBadParams, "trials must be >= 1");
  const auto rows = run_scaling(c);
  Sink out(o.out);
  write_scaling_csv(out.stream(), rows);
  return 0;
}

int cmd_bench(const Options& o, const CLI::App& sub) {
  BenchConfig c;
  if (!o.sizes.empty()) c.sizes = o.sizes;
  if (!o.k_values.empty()) c.k_values = o.k_values;
  if (sub.count("--seed")) c.seed = o.seed;
  c.repeats = o.repeats;
  for (int n : c.sizes) gen_complete_binary(n);  // validate sizes up front
  const auto rows = run_bench(c);
  Sink out(o.out);
  write_bench_csv(out.stream(), rows);
  return 0;
}

int cmd_generate(const Options& o) {
  TreeNetwork tree;
  if (o.topology == "rpa" || o.topology == "sfnet") {
    tree = gen_rpa(o.n, o.seed);
  } else if (o.topology.empty() || o.topology == "btnet" || o.topology == "complete_binary") {
    tree = gen_complete_binary(o.n);
    tree = tree.with_loads(gen_loads(tree, LoadDistribution::kPowerLaw, derive_seed(o.seed, 1)));
  } else {
    throw Error(ErrorCode::kBadParams, "generate needs --topology btnet or rpa");
  }
  tree = apply_overrides(tree, o);
  Sink out(o.out);
  out.stream() << to_topology_json(tree);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aggregation switch placement: solve, simulate and run experiments"};
  app.require_subcommand(1);
  Options o;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_option("--out", o.out, "Output file (default stdout)");
  };
  const auto add_network = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--topology", o.topology,
                                "Topology JSON file, or btnet / rpa for a generated network");
    if (required) opt->required();
    sub->add_option("--n", o.n, "Generated network size, destination included");
    sub->add_option("--rates", o.rates, "Rate scheme {constant|linear|exponential}");
    sub->add_option("--loads", o.loads, "Load distribution {uniform|powerlaw|unit}");
  };

  auto* solve_cmd = app.add_subcommand("solve", "Place blue switches and print the cost");
  add_network(solve_cmd, true);
  add_common(solve_cmd);
  solve_cmd->add_option("--k", o.k, "Budget of blue switches")->required();
  solve_cmd->add_option("--strategy", o.strategy, "soar|top|max|level|allred|allblue|brute");
  solve_cmd->add_option("--dump-tables", o.dump_tables, "Write the DP tables as CSV");

  auto* sim_cmd = app.add_subcommand("simulate", "Evaluate a given placement");
  add_network(sim_cmd, true);
  add_common(sim_cmd);
  sim_cmd->add_option("--placement", o.placement, "Comma-separated blue switch ids");
  sim_cmd->add_option("--use-case", o.use_case, "Payload model {none|wordcount|gradient}");
  sim_cmd->add_option("--corpus", o.corpus, "Text corpus for the word count model");

  auto* exp_cmd = app.add_subcommand("experiment", "Run trials x strategies x budgets");
  add_network(exp_cmd, false);
  add_common(exp_cmd);
  exp_cmd->add_option("--config", o.config, "Experiment JSON config");
  exp_cmd->add_option("--k", o.k, "Single budget");
  exp_cmd->add_option("--k-values", o.k_values, "Budgets")->delimiter(',');
  exp_cmd->add_option("--strategy", o.strategy, "Comma-separated strategies");
  exp_cmd->add_option("--trials", o.trials, "Number of trials");
  exp_cmd->add_option("--use-case", o.use_case, "Payload model {none|wordcount|gradient}");
  exp_cmd->add_option("--corpus", o.corpus, "Text corpus for the word count model");

  auto* scale_cmd = app.add_subcommand("scaling", "Normalized utilization as the network grows");
  add_common(scale_cmd);
  scale_cmd->add_option("--topology", o.topology, "btnet or rpa");
  scale_cmd->add_option("--sizes", o.sizes, "Network sizes")->delimiter(',');
  scale_cmd->add_option("--trials", o.trials, "Trials per size");

  auto* bench_cmd = app.add_subcommand("bench", "Time gather and color");
  add_common(bench_cmd);
  bench_cmd->add_option("--sizes", o.sizes, "Network sizes")->delimiter(',');
  bench_cmd->add_option("--k-values", o.k_values, "Budgets")->delimiter(',');
  bench_cmd->add_option("--repeats", o.repeats, "Runs per cell (median reported)");

  auto* gen_cmd = app.add_subcommand("generate", "Write a generated topology as JSON");
  add_network(gen_cmd, false);
  add_common(gen_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    if (*solve_cmd) return cmd_solve(o);
    if (*sim_cmd) return cmd_simulate(o);
    if (*exp_cmd) return cmd_experiment(o, *exp_cmd);
    if (*scale_cmd) return cmd_scaling(o, *scale_cmd);
    if (*bench_cmd) return cmd_bench(o, *bench_cmd);
    if (*gen_cmd) return cmd_generate(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
