#include "soar/strategies.hpp"

#include <algorithm>
#include <numeric>

#include "soar/error.hpp"
#include "soar/gather.hpp"

namespace soar {

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kAllRed: return "allred";
    case StrategyKind::kAllBlue: return "allblue";
    case StrategyKind::kTop: return "top";
    case StrategyKind::kMax: return "max";
    case StrategyKind::kLevel: return "level";
    case StrategyKind::kSoar: return "soar";
    case StrategyKind::kBruteForce: return "brute";
  }
  return "unknown";
}

std::optional<StrategyKind> parse_strategy(std::string_view name) {
  for (auto kind : {StrategyKind::kAllRed, StrategyKind::kAllBlue, StrategyKind::kTop,
                    StrategyKind::kMax, StrategyKind::kLevel, StrategyKind::kSoar,
                    StrategyKind::kBruteForce}) {
    if (name == to_string(kind)) return kind;
  }
  if (name == "bruteforce" || name == "brute_force") return StrategyKind::kBruteForce;
  return std::nullopt;
}

namespace {

void check_k(int k) {
  if (k < 0) throw Error(ErrorCode::kBudgetNegative, "budget " + std::to_string(k) + " is negative");
}

Placement take_available(const TreeNetwork& tree, const std::vector<NodeIndex>& ranked, int k) {
  std::vector<NodeIndex> chosen;
  for (NodeIndex v : ranked) {
    if (static_cast<int>(chosen.size()) >= k) break;
    if (tree.available(v)) chosen.push_back(v);
  }
  return Placement(std::move(chosen));
}

}  // namespace

Placement place_top(const TreeNetwork& tree, int k) {
  check_k(k);
  std::vector<Load> subtree(tree.size(), 0);
  for (NodeIndex v : tree.post_order()) {
    subtree[v] += tree.load(v);
    if (tree.parent(v) != kNoNode) subtree[tree.parent(v)] += subtree[v];
  }
  // Breadth-first, left to right.
  std::vector<NodeIndex> bfs{tree.root()};
  for (std::size_t head = 0; head < bfs.size(); ++head) {
    for (NodeIndex c : tree.children(bfs[head])) bfs.push_back(c);
  }
  std::stable_sort(bfs.begin(), bfs.end(), [&](NodeIndex a, NodeIndex b) {
    if (tree.depth(a) != tree.depth(b)) return tree.depth(a) < tree.depth(b);
    return subtree[a] > subtree[b];
  });
  return take_available(tree, bfs, k);
}

Placement place_max(const TreeNetwork& tree, int k) {
  check_k(k);
  std::vector<NodeIndex> order(tree.size());
  std::iota(order.begin(), order.end(), NodeIndex{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeIndex a, NodeIndex b) { return tree.load(a) > tree.load(b); });
  return take_available(tree, order, k);
}

Placement place_level(const TreeNetwork& tree, int k) {
  check_k(k);
  if (!tree.is_complete_binary()) {
    throw Error(ErrorCode::kNotCompleteBinary, "Level needs a complete binary tree");
  }
  std::vector<std::vector<NodeIndex>> levels(static_cast<std::size_t>(tree.height()) + 1);
  for (NodeIndex v : tree.pre_order()) {
    if (tree.available(v)) levels[static_cast<std::size_t>(tree.depth(v))].push_back(v);
  }
  for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
    if (!it->empty() && static_cast<int>(it->size()) <= k) return Placement(*it);
  }
  return {};
}

BruteForceResult brute_force(const TreeNetwork& tree, int k, std::uint64_t max_subsets) {
  check_k(k);
  std::vector<NodeIndex> candidates;
  for (NodeIndex v = 0; v < tree.size(); ++v) {
    if (tree.available(v)) candidates.push_back(v);
  }
  const std::size_t m = candidates.size();
  const std::size_t top = std::min<std::size_t>(static_cast<std::size_t>(k), m);

  // Number of subsets of size <= top, guarded against overflow.
  std::uint64_t total = 0;
  std::uint64_t binom = 1;
  for (std::size_t s = 0; s <= top; ++s) {
    if (s > 0) {
      const std::uint64_t num = m - s + 1;
      if (binom > max_subsets * s / num + 1) {
        total = max_subsets + 1;
        break;
      }
      binom = binom * num / s;
    }
    total += binom;
    if (total > max_subsets) break;
  }
  if (total > max_subsets) {
    throw Error(ErrorCode::kInstanceTooLarge,
                "more than " + std::to_string(max_subsets) + " subsets to enumerate");
  }

  BruteForceResult best;
  best.cost = simulate_reduce(tree, Placement{}).total;
  best.subsets = 1;
  const double tol = tree.unit_rates() ? 0.0 : 1e-12;

  std::vector<std::size_t> pick;
  for (std::size_t size = 1; size <= top; ++size) {
    pick.resize(size);
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    while (true) {
      std::vector<NodeIndex> nodes(size);
      for (std::size_t t = 0; t < size; ++t) nodes[t] = candidates[pick[t]];
      Placement candidate(std::move(nodes));
      const double cost = simulate_reduce(tree, candidate).total;
      ++best.subsets;
      if (strictly_less(cost, best.cost, tol)) {
        best.cost = cost;
        best.placement = std::move(candidate);
      }
      // Next combination in lexicographic order.
      std::size_t t = size;
      while (t > 0 && pick[t - 1] == m - size + t - 1) --t;
      if (t == 0) break;
      ++pick[t - 1];
      for (std::size_t u = t; u < size; ++u) pick[u] = pick[u - 1] + 1;
    }
  }
  return best;
}

Placement place(StrategyKind kind, const TreeNetwork& tree, int k) {
  switch (kind) {
    case StrategyKind::kAllRed: return {};
    case StrategyKind::kAllBlue: return Placement::all_available(tree);
    case StrategyKind::kTop: return place_top(tree, k);
    case StrategyKind::kMax: return place_max(tree, k);
    case StrategyKind::kLevel: return place_level(tree, k);
    case StrategyKind::kSoar: return solve(tree, k).placement;
    case StrategyKind::kBruteForce: return brute_force(tree, k).placement;
  }
  return {};
}

}  // namespace soar
