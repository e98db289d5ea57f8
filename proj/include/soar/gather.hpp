#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "soar/reduce.hpp"
#include "soar/topology.hpp"

namespace soar {

/// Cost of an infeasible table entry. Absorbing under addition and larger than
/// every finite cost, so it never wins a minimum.
inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

inline bool is_unreachable(double cost) { return cost == kUnreachable; }

enum class Color : std::uint8_t { kRed = 0, kBlue = 1 };

/// `a < b` with a relative slack; exact when `rel_tol` is 0.
bool strictly_less(double a, double b, double rel_tol);

/// Best cost of a subtree per (level, budget). `level` is the hop distance
/// from the subtree root to its closest blue ancestor (or to d) and runs over
/// 1..max_level, where max_level = depth + 1.
class CostTable {
 public:
  CostTable() = default;
  CostTable(int max_level, int budget)
      : max_level_(max_level), budget_(budget),
        cells_(static_cast<std::size_t>(max_level) * (budget + 1), kUnreachable) {}

  int max_level() const { return max_level_; }
  int budget() const { return budget_; }
  std::size_t cell_count() const { return cells_.size(); }

  double at(int level, int i) const { return cells_[offset(level, i)]; }
  double& at(int level, int i) { return cells_[offset(level, i)]; }
  const double* row(int level) const { return &cells_[offset(level, 0)]; }
  double* row(int level) { return &cells_[offset(level, 0)]; }

  friend bool operator==(const CostTable&, const CostTable&) = default;

 private:
  std::size_t offset(int level, int i) const {
    return static_cast<std::size_t>(level - 1) * (budget_ + 1) + static_cast<std::size_t>(i);
  }

  int max_level_ = 0;
  int budget_ = 0;
  std::vector<double> cells_;
};

/// One partial fold of a node over its first m children, for both colors of
/// the node itself.
class SplitTable {
 public:
  SplitTable() = default;
  SplitTable(int max_level, int budget)
      : red_(max_level, budget), blue_(max_level, budget) {}

  int max_level() const { return red_.max_level(); }
  int budget() const { return red_.budget(); }

  const CostTable& side(Color c) const { return c == Color::kBlue ? blue_ : red_; }
  CostTable& side(Color c) { return c == Color::kBlue ? blue_ : red_; }
  double at(int level, int i, Color c) const { return side(c).at(level, i); }

  friend bool operator==(const SplitTable&, const SplitTable&) = default;

 private:
  CostTable red_;
  CostTable blue_;
};

struct NodeTables {
  CostTable x;
  std::vector<SplitTable> y;  // y[m - 1] folds children c_1..c_m; empty for leaves
  std::vector<Color> choice;  // color attaining x, same layout as x

  friend bool operator==(const NodeTables&, const NodeTables&) = default;
};

struct GatherTables {
  int budget = 0;
  std::vector<NodeTables> nodes;  // indexed by NodeIndex

  double x(NodeIndex v, int level, int i) const { return nodes[v].x.at(level, i); }
  double y(NodeIndex v, int m, int level, int i, Color c) const {
    return nodes[v].y[static_cast<std::size_t>(m - 1)].at(level, i, c);
  }
  Color choice(NodeIndex v, int level, int i) const;
  std::size_t x_cell_count() const;

  friend bool operator==(const GatherTables&, const GatherTables&) = default;
};

/// Cheapest way to hand `j` of the `budget` blue switches to child c_m given
/// the fold over c_1..c_{m-1}. For a blue parent the child sits one hop below
/// a blue switch and j < budget (the parent keeps one); for a red parent the
/// child inherits level + 1 and 0 <= j <= budget.
double mincost(int level, int budget, const SplitTable& previous, const CostTable& child,
               Color color);

/// The j attaining mincost; ties go to the smallest j.
int minsplit(int level, int budget, const SplitTable& previous, const CostTable& child,
             Color color, double rel_tol = 0.0);

/// Bottom-up table construction. Serial reference implementation.
GatherTables gather(const TreeNetwork& tree, int budget);

/// Same tables, nodes of one depth processed concurrently with OpenMP.
/// Results are bitwise identical to gather().
GatherTables gather_parallel(const TreeNetwork& tree, int budget);

/// Root row of the tables: entry i is the optimal cost with at most i blue
/// switches. Frees child tables as it goes, so memory stays near one level.
std::vector<double> optimal_costs(const TreeNetwork& tree, int budget);

/// Top-down traceback of an optimal placement with at most `budget` blue switches.
Placement color(const TreeNetwork& tree, const GatherTables& tables, int budget);

struct SolveStats {
  std::size_t node_visits = 0;
  std::size_t table_cells = 0;
  double gather_ms = 0.0;
  double color_ms = 0.0;
};

struct SolveResult {
  Placement placement;
  double cost = 0.0;
  std::optional<GatherTables> tables;
  SolveStats stats;
};

struct SolveOptions {
  bool keep_tables = false;
  bool parallel = false;
};

/// Optimal placement of at most k blue switches among the available ones.
SolveResult solve(const TreeNetwork& tree, int k, SolveOptions options = {});

/// CSV dump "node_id,level,budget,x,color,y_red,y_blue" of the final fold.
void write_tables_csv(std::ostream& out, const TreeNetwork& tree, const GatherTables& tables);

}  // namespace soar
