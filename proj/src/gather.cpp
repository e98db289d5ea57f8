#include "soar/gather.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "soar/error.hpp"

#if defined(SOAR_USE_OPENMP)
#include <omp.h>
#endif

namespace soar {

bool strictly_less(double a, double b, double rel_tol) {
  if (is_unreachable(a)) return false;
  if (is_unreachable(b)) return true;
  return a < b - rel_tol * std::max(std::abs(a), std::abs(b));
}

Color GatherTables::choice(NodeIndex v, int level, int i) const {
  const auto& node = nodes[v];
  return node.choice[static_cast<std::size_t>(level - 1) * (budget + 1) + static_cast<std::size_t>(i)];
}

std::size_t GatherTables::x_cell_count() const {
  std::size_t total = 0;
  for (const auto& n : nodes) total += n.x.cell_count();
  return total;
}

double mincost(int level, int budget, const SplitTable& previous, const CostTable& child,
               Color color) {
  double best = kUnreachable;
  if (color == Color::kBlue) {
    const double* prev = previous.side(Color::kBlue).row(level);
    const double* below = child.row(1);
    for (int j = 0; j < budget; ++j) best = std::min(best, prev[budget - j] + below[j]);
  } else {
    const double* prev = previous.side(Color::kRed).row(level);
    const double* below = child.row(level + 1);
    for (int j = 0; j <= budget; ++j) best = std::min(best, prev[budget - j] + below[j]);
  }
  return best;
}

int minsplit(int level, int budget, const SplitTable& previous, const CostTable& child,
             Color color, double rel_tol) {
  const bool blue = color == Color::kBlue;
  const double* prev = previous.side(color).row(level);
  const double* below = child.row(blue ? 1 : level + 1);
  const int last = blue ? budget - 1 : budget;
  int best_j = 0;
  double best = kUnreachable;
  for (int j = 0; j <= last; ++j) {
    const double value = prev[budget - j] + below[j];
    if (strictly_less(value, best, rel_tol)) {
      best = value;
      best_j = j;
    }
  }
  return best_j;
}

namespace {

void gather_leaf(const TreeNetwork& tree, NodeIndex v, int budget, NodeTables& out) {
  const int levels = tree.depth(v) + 1;
  out.x = CostTable(levels, budget);
  out.choice.assign(out.x.cell_count(), Color::kRed);
  // A zero-load leaf gains nothing from aggregating, so it stays red.
  const bool can_be_blue = tree.available(v) && tree.load(v) > 0;
  const double load = static_cast<double>(tree.load(v));
  for (int l = 1; l <= levels; ++l) {
    const double distance = tree.rho_to_ancestor(v, l);
    double* x = out.x.row(l);
    Color* choice = &out.choice[static_cast<std::size_t>(l - 1) * (budget + 1)];
    x[0] = distance * load;
    for (int i = 1; i <= budget; ++i) {
      if (can_be_blue) {
        x[i] = distance;
        choice[i] = Color::kBlue;
      } else {
        x[i] = distance * load;
      }
    }
  }
}

void gather_internal(const TreeNetwork& tree, NodeIndex v, int budget,
                     std::vector<NodeTables>& nodes) {
  NodeTables& out = nodes[v];
  const int levels = tree.depth(v) + 1;
  const auto kids = tree.children(v);
  const bool available = tree.available(v);
  const double load = static_cast<double>(tree.load(v));

  out.y.assign(kids.size(), SplitTable(levels, budget));
  for (std::size_t m = 0; m < kids.size(); ++m) {
    const CostTable& child = nodes[kids[m]].x;
    SplitTable& fold = out.y[m];
    for (int l = 1; l <= levels; ++l) {
      const double distance = tree.rho_to_ancestor(v, l);
      double* blue = fold.side(Color::kBlue).row(l);
      double* red = fold.side(Color::kRed).row(l);
      if (m == 0) {
        const double* below_blue = child.row(1);
        const double* below_red = child.row(l + 1);
        for (int i = 0; i <= budget; ++i) {
          blue[i] = (available && i > 0) ? below_blue[i - 1] + distance : kUnreachable;
          red[i] = below_red[i] + distance * load;
        }
      } else {
        const SplitTable& previous = out.y[m - 1];
        for (int i = 0; i <= budget; ++i) {
          blue[i] = available ? mincost(l, i, previous, child, Color::kBlue) : kUnreachable;
          red[i] = mincost(l, i, previous, child, Color::kRed);
        }
      }
    }
  }

  const SplitTable& last = out.y.back();
  out.x = CostTable(levels, budget);
  out.choice.assign(out.x.cell_count(), Color::kRed);
  for (int l = 1; l <= levels; ++l) {
    const double* blue = last.side(Color::kBlue).row(l);
    const double* red = last.side(Color::kRed).row(l);
    double* x = out.x.row(l);
    Color* choice = &out.choice[static_cast<std::size_t>(l - 1) * (budget + 1)];
    for (int i = 0; i <= budget; ++i) {
      if (blue[i] < red[i]) {
        x[i] = blue[i];
        choice[i] = Color::kBlue;
      } else {
        x[i] = red[i];
      }
    }
  }
}

void gather_node(const TreeNetwork& tree, NodeIndex v, int budget, std::vector<NodeTables>& nodes) {
  if (tree.is_leaf(v)) {
    gather_leaf(tree, v, budget, nodes[v]);
  } else {
    gather_internal(tree, v, budget, nodes);
  }
}

void check_budget(int budget) {
  if (budget < 0) {
    throw Error(ErrorCode::kBudgetNegative, "budget " + std::to_string(budget) + " is negative");
  }
}

}  // namespace

GatherTables gather(const TreeNetwork& tree, int budget) {
  check_budget(budget);
  GatherTables tables;
  tables.budget = budget;
  tables.nodes.resize(tree.size());
  for (NodeIndex v : tree.post_order()) gather_node(tree, v, budget, tables.nodes);
  return tables;
}

GatherTables gather_parallel(const TreeNetwork& tree, int budget) {
  check_budget(budget);
  GatherTables tables;
  tables.budget = budget;
  tables.nodes.resize(tree.size());

  std::vector<std::vector<NodeIndex>> levels(static_cast<std::size_t>(tree.height()) + 1);
  for (NodeIndex v : tree.pre_order()) levels[static_cast<std::size_t>(tree.depth(v))].push_back(v);

  for (auto level = levels.rbegin(); level != levels.rend(); ++level) {
    const auto& members = *level;
    const auto count = static_cast<std::ptrdiff_t>(members.size());
#if defined(SOAR_USE_OPENMP)
#pragma omp parallel for schedule(dynamic, 1) if (count > 1)
#endif
    for (std::ptrdiff_t idx = 0; idx < count; ++idx) {
      gather_node(tree, members[static_cast<std::size_t>(idx)], budget, tables.nodes);
    }
  }
  return tables;
}

std::vector<double> optimal_costs(const TreeNetwork& tree, int budget) {
  check_budget(budget);
  std::vector<NodeTables> nodes(tree.size());
  for (NodeIndex v : tree.post_order()) {
    gather_node(tree, v, budget, nodes);
    nodes[v].y.clear();
    nodes[v].y.shrink_to_fit();
    nodes[v].choice.clear();
    nodes[v].choice.shrink_to_fit();
    for (NodeIndex c : tree.children(v)) nodes[c] = NodeTables{};
  }
  const double* row = nodes[tree.root()].x.row(1);
  return {row, row + budget + 1};
}

Placement color(const TreeNetwork& tree, const GatherTables& tables, int budget) {
  check_budget(budget);
  if (tables.budget != budget || tables.nodes.size() != tree.size()) {
    throw Error(ErrorCode::kTableMismatch, "tables were gathered for a different instance");
  }
  for (NodeIndex v = 0; v < tree.size(); ++v) {
    const auto& node = tables.nodes[v];
    if (node.x.max_level() != tree.depth(v) + 1 || node.y.size() != tree.children(v).size()) {
      throw Error(ErrorCode::kTableMismatch, "table shape differs at switch '" + tree.id(v) + "'");
    }
  }

  const double tol = tree.unit_rates() ? 0.0 : 1e-9;
  std::vector<int> assigned(tree.size(), 0);
  std::vector<int> level(tree.size(), 1);
  assigned[tree.root()] = budget;
  level[tree.root()] = 1;

  std::vector<NodeIndex> blue;
  for (NodeIndex v : tree.pre_order()) {
    int i = assigned[v];
    const int l = level[v];
    if (tree.is_leaf(v)) {
      if (i > 0 && tree.available(v) && tree.load(v) > 0) blue.push_back(v);
      continue;
    }
    const auto& folds = tables.nodes[v].y;
    const auto kids = tree.children(v);
    const Color c = strictly_less(folds.back().at(l, i, Color::kBlue),
                                  folds.back().at(l, i, Color::kRed), tol)
                        ? Color::kBlue
                        : Color::kRed;
    if (c == Color::kBlue) blue.push_back(v);
    const int child_level = c == Color::kBlue ? 1 : l + 1;
    for (std::size_t m = kids.size(); m >= 2; --m) {
      const NodeIndex child = kids[m - 1];
      const int j = minsplit(l, i, folds[m - 2], tables.nodes[child].x, c, tol);
      assigned[child] = j;
      level[child] = child_level;
      i -= j;
    }
    assigned[kids[0]] = c == Color::kBlue ? i - 1 : i;
    level[kids[0]] = child_level;
  }
  return Placement(std::move(blue));
}

SolveResult solve(const TreeNetwork& tree, int k, SolveOptions options) {
  check_budget(k);
  // Budget beyond the available switches cannot be used.
  const int budget = std::min<int>(k, static_cast<int>(tree.available_count()));

  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  GatherTables tables = options.parallel ? gather_parallel(tree, budget) : gather(tree, budget);
  const auto t1 = clock::now();
  SolveResult result;
  result.placement = color(tree, tables, budget);
  const auto t2 = clock::now();

  result.cost = tables.x(tree.root(), 1, budget);
  result.stats.node_visits = tree.size();
  result.stats.table_cells = tables.x_cell_count();
  result.stats.gather_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  result.stats.color_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
  if (options.keep_tables) result.tables = std::move(tables);
  return result;
}

void write_tables_csv(std::ostream& out, const TreeNetwork& tree, const GatherTables& tables) {
  out << "node_id,level,budget,x,color,y_red,y_blue\n";
  for (NodeIndex v : tree.pre_order()) {
    const auto& node = tables.nodes[v];
    for (int l = 1; l <= node.x.max_level(); ++l) {
      for (int i = 0; i <= tables.budget; ++i) {
        out << tree.id(v) << ',' << l << ',' << i << ',' << node.x.at(l, i) << ','
            << (tables.choice(v, l, i) == Color::kBlue ? 'B' : 'R') << ',';
        if (!node.y.empty()) {
          out << node.y.back().at(l, i, Color::kRed) << ',' << node.y.back().at(l, i, Color::kBlue);
        } else {
          out << ',';
        }
        out << '\n';
      }
    }
  }
}

}  // namespace soar
