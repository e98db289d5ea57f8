#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "soar/reduce.hpp"
#include "soar/topology.hpp"

namespace soar {

enum class StrategyKind { kAllRed, kAllBlue, kTop, kMax, kLevel, kSoar, kBruteForce };

std::string_view to_string(StrategyKind kind);
std::optional<StrategyKind> parse_strategy(std::string_view name);

/// The k available switches closest to the root (hop distance). Depth ties go
/// to the switch with the larger subtree load, then to breadth-first order.
Placement place_top(const TreeNetwork& tree, int k);

/// The k available switches with the largest load; ties by node index.
Placement place_max(const TreeNetwork& tree, int k);

/// On a complete binary tree, the available switches of the deepest level
/// that has between 1 and k available switches.
Placement place_level(const TreeNetwork& tree, int k);

struct BruteForceResult {
  Placement placement;
  double cost = 0.0;
  std::uint64_t subsets = 0;
};

inline constexpr std::uint64_t kBruteForceLimit = 10'000'000;

/// Exhaustive minimum over every available subset of size at most k.
BruteForceResult brute_force(const TreeNetwork& tree, int k,
                             std::uint64_t max_subsets = kBruteForceLimit);

/// Dispatches on `kind`. AllBlue ignores k and returns every available switch.
Placement place(StrategyKind kind, const TreeNetwork& tree, int k);

}  // namespace soar
