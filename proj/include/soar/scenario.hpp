#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "soar/reduce.hpp"
#include "soar/strategies.hpp"
#include "soar/topology.hpp"

namespace soar {

enum class RateScheme { kConstant, kLinear, kExponential };
enum class LoadDistribution { kUniform, kPowerLaw, kUnit, kExplicit };
enum class UseCase { kNone, kWordCount, kGradient };

std::string_view to_string(RateScheme scheme);
std::string_view to_string(LoadDistribution dist);
std::string_view to_string(UseCase use_case);
std::optional<RateScheme> parse_rate_scheme(std::string_view name);
std::optional<LoadDistribution> parse_load_distribution(std::string_view name);
std::optional<UseCase> parse_use_case(std::string_view name);

using Rng = std::mt19937_64;

/// Stable 64-bit mix of a base seed and a stream index (splitmix64).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// ---- topologies ----

/// btnet(n): complete binary switch tree with n - 1 = 2^(h+1) - 1 switches
/// (n counts the destination). Switch ids are "0".."n-2" in breadth-first
/// order. Uplink rates grow from 1 at the leaves toward the root, one step per
/// level (+1 linear, x2 exponential); the root-destination link takes the next
/// step. All loads are 0.
TreeNetwork gen_complete_binary(int n, RateScheme scheme = RateScheme::kConstant);

/// Random preferential-attachment tree with n - 1 switches: each new switch
/// attaches to an existing one with probability proportional to its degree
/// (the root's link to d counts). Every switch has load 1; rates are 1.
TreeNetwork gen_rpa(int n, std::uint64_t seed);

/// Re-rates every uplink by its level counted from the deepest leaves
/// (level 1 at depth h, level h+1 for the root-destination link).
TreeNetwork apply_rate_scheme(const TreeNetwork& tree, RateScheme scheme);

// ---- loads ----

/// P(x) proportional to (x + shift)^-exponent on the integers 1..63, fitted
/// to mean 5 and variance 97.1.
struct PowerLawShape {
  double exponent = 0.0;
  double shift = 0.0;
};
PowerLawShape powerlaw_shape();

/// Draws one load. Uniform is {4,5,6}; unit is 1.
Load draw_load(LoadDistribution dist, Rng& rng);

/// Leaves draw from `dist`, internal switches get 0. Unit gives every switch
/// load 1; explicit returns the tree's current loads.
std::vector<Load> gen_loads(const TreeNetwork& tree, LoadDistribution dist, std::uint64_t seed);

// ---- payloads ----

struct PayloadParams {
  std::uint32_t entry_bytes = 8;
  // word count
  std::uint32_t vocabulary_size = 800'000;
  std::uint32_t words_per_server = 1'000;
  double zipf_exponent = 1.0;
  std::optional<std::string> corpus_path;
  // gradient
  std::uint32_t feature_count = 10'000;
  double dropout = 0.5;
};

/// Word count: every server draws a word multiset (Zipf over the vocabulary),
/// or takes a round-robin shard of a whitespace-tokenized, lower-cased corpus;
/// its payload is the set of distinct words. Gradient: every server holds a
/// random support of round(F * (1 - dropout)) features.
PayloadModel gen_payloads(const TreeNetwork& tree, UseCase use_case, const PayloadParams& params,
                          std::uint64_t seed);

// ---- online workloads ----

inline constexpr std::int64_t kUnboundedCapacity = std::numeric_limits<std::int64_t>::max();

/// Per-switch aggregation capacity and what is left of it.
class CapacityLedger {
 public:
  explicit CapacityLedger(std::vector<std::int64_t> capacity);

  std::int64_t capacity(NodeIndex v) const { return capacity_[v]; }
  std::int64_t residual(NodeIndex v) const { return residual_[v]; }
  const std::vector<Placement>& history() const { return history_; }

  /// Switches with residual capacity that the tree also marks available.
  std::vector<bool> available(const TreeNetwork& tree) const;
  /// Records one workload's blue switches; each must have residual capacity.
  void consume(const Placement& blue);

 private:
  std::vector<std::int64_t> capacity_;
  std::vector<std::int64_t> residual_;
  std::vector<Placement> history_;
};

struct OnlineStep {
  Placement placement;
  double cost = 0.0;
  double all_red_cost = 0.0;
  double normalized = 1.0;
};

struct OnlineResult {
  std::vector<OnlineStep> steps;
  CapacityLedger ledger;
};

/// Handles workloads in order; workload t sees only switches with residual
/// capacity. `budgets` has one entry per workload, or a single shared entry.
OnlineResult run_online(const TreeNetwork& tree, std::span<const std::vector<Load>> workloads,
                        std::span<const int> budgets, std::span<const std::int64_t> capacities,
                        StrategyKind strategy);

/// Workload sequence where each workload flips a fair coin between uniform
/// and power-law leaf loads.
std::vector<std::vector<Load>> gen_online_workloads(const TreeNetwork& tree, int count,
                                                    std::uint64_t seed);

}  // namespace soar
