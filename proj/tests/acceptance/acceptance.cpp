// Acceptance checks 1-12. Prints one PASS/FAIL line per criterion; exits
// nonzero if any selected criterion fails. `--criterion N` runs only N.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "soar/experiment.hpp"
#include "soar/gather.hpp"
#include "soar/reduce.hpp"
#include "soar/scenario.hpp"
#include "soar/strategies.hpp"

using namespace soar;
namespace st = soar::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double cost(const TreeNetwork& t, const Placement& p) { return simulate_reduce(t, p).total; }

Verdict golden_five() {
  Verdict v;
  const TreeNetwork t = st::five_switch_tree();
  const auto start = Clock::now();
  const double red = cost(t, Placement{});
  const double blue = cost(t, Placement::all_available(t));
  const double ms = seconds_since(start) * 1e3;
  v.detail << "all-red " << red << ", all-blue " << blue << ", " << ms << " ms";
  v.require(red == 14.0, "all-red = 14");
  v.require(blue == 5.0, "all-blue = 5");
  v.require(ms < 1.0, "< 1 ms");
  return v;
}

Verdict golden_seven() {
  Verdict v;
  const TreeNetwork t = st::seven_switch_tree();
  const auto start = Clock::now();
  const double top = cost(t, place_top(t, 2));
  const double max = cost(t, place_max(t, 2));
  const double level = cost(t, place_level(t, 2));
  const double soar = solve(t, 2).cost;
  const double ms = seconds_since(start) * 1e3;
  v.detail << "Top " << top << ", Max " << max << ", Level " << level << ", SOAR " << soar << ", "
           << ms << " ms";
  v.require(top == 27.0, "Top = 27");
  v.require(max == 24.0, "Max = 24");
  v.require(level == 21.0, "Level = 21");
  v.require(soar == 20.0, "SOAR = 20");
  v.require(ms < 1.0, "< 1 ms");
  return v;
}

Verdict golden_budgets() {
  Verdict v;
  const TreeNetwork t = st::seven_switch_tree();
  const double expected[] = {35, 20, 15, 11};
  v.detail << "costs";
  for (int k = 1; k <= 4; ++k) {
    const double c = solve(t, k).cost;
    v.detail << ' ' << c;
    v.require(c == expected[k - 1], "k=" + std::to_string(k));
  }
  v.require(solve(t, 2).placement == st::ids(t, {"a2", "b"}), "k=2 placement {a2, b}");
  v.require(solve(t, 3).placement == st::ids(t, {"a2", "b1", "b2"}), "k=3 placement {a2, b1, b2}");
  return v;
}

Verdict table_spots() {
  Verdict v;
  const TreeNetwork t = st::seven_switch_tree();
  const GatherTables g = gather(t, 2);
  const NodeIndex r = t.root();
  const NodeIndex a = t.index_of("a");
  const NodeIndex b = t.index_of("b");
  const double got[] = {g.y(r, 2, 1, 2, Color::kRed), g.y(r, 2, 1, 2, Color::kBlue), g.x(a, 2, 1),
                        g.x(b, 2, 1),                 g.x(a, 1, 1),                  g.x(b, 1, 0)};
  const double want[] = {20, 25, 9, 11, 6, 18};
  v.detail << "values";
  for (int i = 0; i < 6; ++i) {
    v.detail << ' ' << got[i];
    v.require(got[i] == want[i], "entry " + std::to_string(i + 1));
  }
  return v;
}

Verdict oracle_equivalence() {
  Verdict v;
  std::mt19937_64 rng(20240501);
  const auto start = Clock::now();
  int mismatches = 0;
  const int instances = 600;
  for (int trial = 0; trial < instances; ++trial) {
    const TreeNetwork t = st::random_instance(rng, {.min_switches = 1, .max_switches = 14});
    const int k = std::uniform_int_distribution<int>(0, 4)(rng);
    if (!st::close_enough(solve(t, k).cost, brute_force(t, k).cost, t.unit_rates())) ++mismatches;
  }
  const double s = seconds_since(start);
  v.detail << instances << " instances, " << mismatches << " mismatches, " << s << " s";
  v.require(mismatches == 0, "no mismatches");
  v.require(s < 30.0, "< 30 s");
  return v;
}

Verdict barrier_identity() {
  Verdict v;
  std::mt19937_64 rng(77);
  const auto start = Clock::now();
  int mismatches = 0;
  const int instances = 1500;
  for (int trial = 0; trial < instances; ++trial) {
    const TreeNetwork t = st::random_instance(rng);
    const Placement u = st::random_subset(rng, t, true);
    if (!st::close_enough(simulate_reduce(t, u).total, utilization_barrier(t, u), t.unit_rates())) {
      ++mismatches;
    }
  }
  const double s = seconds_since(start);
  v.detail << instances << " instances, " << mismatches << " mismatches, " << s << " s";
  v.require(mismatches == 0, "no mismatches");
  v.require(s < 10.0, "< 10 s");
  return v;
}

Verdict potential_recursion() {
  Verdict v;
  std::mt19937_64 rng(78);
  const auto start = Clock::now();
  int mismatches = 0;
  const int instances = 800;
  for (int trial = 0; trial < instances; ++trial) {
    const TreeNetwork t = st::random_instance(rng);
    const Placement u = st::random_subset(rng, t, true);
    const auto node = std::uniform_int_distribution<NodeIndex>(0, t.size() - 1)(rng);
    const int l = std::uniform_int_distribution<int>(1, t.depth(node) + 1)(rng);
    if (!st::close_enough(st::pi_direct(t, u, node, l), st::pi_recursive(t, u, node, l), t.unit_rates())) {
      ++mismatches;
    }
  }
  const double s = seconds_since(start);
  v.detail << instances << " instances, " << mismatches << " mismatches, " << s << " s";
  v.require(mismatches == 0, "no mismatches");
  v.require(s < 10.0, "< 10 s");
  return v;
}

Verdict dominance() {
  Verdict v;
  std::mt19937_64 rng(79);
  const auto start = Clock::now();
  int instances = 0;
  int rpa = 0;
  int monotone_violations = 0;
  int dominance_violations = 0;
  const RateScheme schemes[] = {RateScheme::kConstant, RateScheme::kLinear, RateScheme::kExponential};
  for (int trial = 0; trial < 240; ++trial) {
    TreeNetwork t;
    switch (trial % 3) {
      case 0:
        t = gen_rpa(std::uniform_int_distribution<int>(16, 128)(rng), rng());
        ++rpa;
        break;
      case 1: {
        t = gen_complete_binary(1 << std::uniform_int_distribution<int>(3, 8)(rng));
        const auto dist = trial % 2 ? LoadDistribution::kPowerLaw : LoadDistribution::kUniform;
        t = apply_rate_scheme(t.with_loads(gen_loads(t, dist, rng())), schemes[(trial / 3) % 3]);
        break;
      }
      default:
        t = st::random_instance(rng, {.min_switches = 2, .max_switches = 40});
        break;
    }
    const int max_k = std::min<int>(8, static_cast<int>(t.available_count()));
    const std::vector<double> row = optimal_costs(t, max_k);
    for (int k = 1; k <= max_k; ++k) {
      if (row[k] > row[k - 1]) ++monotone_violations;
    }
    const double slack = t.unit_rates() ? 0.0 : 1e-9;
    for (int k = 0; k <= max_k; ++k) {
      const double soar = row[k];
      std::vector<double> baselines{cost(t, place_top(t, k)), cost(t, place_max(t, k)),
                                    cost(t, Placement{})};
      if (t.is_complete_binary()) baselines.push_back(cost(t, place_level(t, k)));
      for (double b : baselines) {
        if (soar > b + slack * b) ++dominance_violations;
      }
    }
    ++instances;
  }
  const double s = seconds_since(start);
  v.detail << instances << " instances (" << rpa << " RPA), " << monotone_violations
           << " monotonicity and " << dominance_violations << " dominance violations, " << s << " s";
  v.require(monotone_violations == 0, "non-increasing in k");
  v.require(dominance_violations == 0, "SOAR <= baselines");
  v.require(s < 30.0, "< 30 s");
  return v;
}

Verdict scaling() {
  Verdict v;
  const auto start = Clock::now();
  ScalingConfig c;
  c.sizes = {512, 4096};
  c.rules = {BudgetRule::kFraction};
  c.reductions = {0.7};
  c.trials = 10;
  const auto rows = run_scaling(c);
  double small = 0;
  double large = 0;
  double fraction = 0;
  for (const auto& r : rows) {
    if (r.kind == "budget" && r.n == 512) small += r.normalized / c.trials;
    if (r.kind == "budget" && r.n == 4096) large += r.normalized / c.trials;
    if (r.kind == "reduction" && r.n == 4096) fraction += r.blue_fraction / c.trials;
  }
  const double s = seconds_since(start);
  v.detail << std::setprecision(4) << "btnet(512) k=5 mean " << small << ", btnet(4096) k=41 mean "
           << large << ", 70% reduction blue fraction " << 100 * fraction << "%, " << s << " s";
  v.require(small >= 0.58 && small <= 0.72, "0.65 +- 0.07");
  v.require(large <= 0.55, "<= 0.50 + 0.05");
  v.require(fraction < 0.03, "blue fraction < 3%");
  v.require(s <= 300.0, "<= 5 min");
  return v;
}

Verdict runtime_shape() {
  Verdict v;
  const auto start = Clock::now();
  TreeNetwork mid = gen_complete_binary(1024);
  mid = mid.with_loads(gen_loads(mid, LoadDistribution::kPowerLaw, 5));
  const TimingSample k32 = time_solver(mid, 32, 5, false);
  const TimingSample k64 = time_solver(mid, 64, 5, false);
  const double k_ratio = k64.gather_ms / k32.gather_ms;

  TreeNetwork big = gen_complete_binary(2048);
  big = big.with_loads(gen_loads(big, LoadDistribution::kPowerLaw, 6));
  const TimingSample k128 = time_solver(big, 128, 3, false);
  const double color_share = k128.color_ms / k128.gather_ms;

  const double n_ratio = time_solver(big, 32, 5, false).gather_ms / k32.gather_ms;
  const double s = seconds_since(start);
  v.detail << std::setprecision(4) << "gather k=64/k=32 at n=1024: " << k_ratio
           << ", color/gather at n=2048 k=128: " << 100 * color_share
           << "%, gather n=2048/n=1024 at k=32: " << n_ratio << ", " << s << " s";
  v.require(k_ratio >= 2.5 && k_ratio <= 6.0, "k doubling ratio in [2.5, 6]");
  v.require(color_share <= 0.01, "color <= 1% of gather");
  v.require(s <= 300.0, "<= 5 min");
  return v;
}

Verdict byte_complexity() {
  Verdict v;
  const auto start = Clock::now();

  int gradient_mismatches = 0;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    TreeNetwork t = gen_complete_binary(128);
    t = t.with_loads(gen_loads(t, LoadDistribution::kPowerLaw, derive_seed(seed, 1)));
    PayloadParams p;
    p.dropout = 0.0;
    p.feature_count = 256;
    const PayloadModel m = gen_payloads(t, UseCase::kGradient, p, derive_seed(seed, 2));
    const double red_msgs = cost(t, Placement{});
    const auto red_bytes = static_cast<double>(simulate_bytes(t, Placement{}, m).total);
    for (StrategyKind s : {StrategyKind::kSoar, StrategyKind::kTop, StrategyKind::kMax,
                           StrategyKind::kLevel, StrategyKind::kAllBlue}) {
      for (int k : {1, 4, 16}) {
        const Placement u = place(s, t, k);
        const double msgs = cost(t, u) / red_msgs;
        const double bytes = static_cast<double>(simulate_bytes(t, u, m).total) / red_bytes;
        if (msgs != bytes) ++gradient_mismatches;
      }
    }
  }

  int order_violations = 0;
  double ratio_sum = 0;
  const int seeds = 5;
  for (std::uint64_t seed = 0; seed < seeds; ++seed) {
    TreeNetwork t = gen_complete_binary(256);
    t = t.with_loads(gen_loads(t, LoadDistribution::kPowerLaw, derive_seed(seed, 11)));
    const PayloadModel m = gen_payloads(t, UseCase::kWordCount, PayloadParams{}, derive_seed(seed, 12));
    const auto blue = simulate_bytes(t, Placement::all_available(t), m).total;
    const auto red = simulate_bytes(t, Placement{}, m).total;
    for (int k : {1, 2, 4, 8, 16, 32}) {
      const auto soar = simulate_bytes(t, solve(t, k).placement, m).total;
      if (!(blue <= soar && soar <= red)) ++order_violations;
      if (k == 8) ratio_sum += static_cast<double>(soar) / static_cast<double>(blue);
    }
  }
  const double ratio = ratio_sum / seeds;
  const double s = seconds_since(start);
  v.detail << std::setprecision(4) << gradient_mismatches << " gradient mismatches, "
           << order_violations << " word count ordering violations, SOAR(k=8)/all-blue bytes "
           << ratio << ", " << s << " s";
  v.require(gradient_mismatches == 0, "gradient bytes track messages");
  v.require(order_violations == 0, "all-blue <= SOAR <= all-red bytes");
  v.require(ratio <= 1.10, "SOAR within 10% of all-blue bytes");
  v.require(s <= 120.0, "<= 2 min");
  return v;
}

Verdict online() {
  Verdict v;
  const auto start = Clock::now();

  int oracle_mismatches = 0;
  int red_mismatches = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const TreeNetwork t = gen_complete_binary(16);
    const auto workloads = gen_online_workloads(t, 8, seed);
    const std::vector<int> budget{3};
    const std::vector<std::int64_t> unbounded{kUnboundedCapacity};
    const OnlineResult r = run_online(t, workloads, budget, unbounded, StrategyKind::kSoar);
    for (std::size_t w = 0; w < workloads.size(); ++w) {
      if (r.steps[w].cost != brute_force(t.with_loads(workloads[w]), 3).cost) ++oracle_mismatches;
    }
    const std::vector<std::int64_t> none{0};
    for (const auto& step : run_online(t, workloads, budget, none, StrategyKind::kSoar).steps) {
      if (step.cost != step.all_red_cost) ++red_mismatches;
    }
  }

  const TreeNetwork base = gen_complete_binary(256);
  const auto workloads = gen_online_workloads(base, 32, 99);
  const std::vector<int> budget{16};
  const std::vector<std::int64_t> capacity{4};
  const OnlineResult r = run_online(base, workloads, budget, capacity, StrategyKind::kSoar);
  std::vector<int> used(base.size(), 0);
  int over_budget = 0;
  for (const auto& step : r.steps) {
    if (step.placement.size() > 16) ++over_budget;
    for (NodeIndex n : step.placement.nodes()) ++used[n];
  }
  const int peak = *std::max_element(used.begin(), used.end());
  const double s = seconds_since(start);
  v.detail << oracle_mismatches << " oracle mismatches, " << red_mismatches
           << " zero-capacity mismatches, peak use " << peak << "/4 over 32 workloads, " << s << " s";
  v.require(oracle_mismatches == 0, "unbounded = standalone optimum");
  v.require(red_mismatches == 0, "zero capacity = all-red");
  v.require(peak <= 4 && over_budget == 0, "capacity safety");
  v.require(s <= 60.0, "<= 1 min");
  return v;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--criterion N]\n";
      return 2;
    }
  }

  const std::vector<Criterion> criteria{
      {1, "five switch golden example", golden_five},
      {2, "seven switch strategies at k=2", golden_seven},
      {3, "seven switch SOAR costs and placements", golden_budgets},
      {4, "DP table spot check", table_spots},
      {5, "oracle equivalence", oracle_equivalence},
      {6, "edge sum equals barrier sum", barrier_identity},
      {7, "potential recursion", potential_recursion},
      {8, "monotonicity and dominance", dominance},
      {9, "scaling reproduction", scaling},
      {10, "runtime shape", runtime_shape},
      {11, "byte complexity", byte_complexity},
      {12, "online scenario", online},
  };

  int failures = 0;
  bool ran = false;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    ran = true;
    const Verdict v = c.run();
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name
              << "): " << v.detail.str() << std::endl;
    if (!v.pass) ++failures;
  }
  if (!ran) {
    std::cerr << "no criterion " << only << '\n';
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
