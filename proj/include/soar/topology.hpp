#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace soar {

/// Dense index of a switch inside a TreeNetwork, assigned in input order.
using NodeIndex = std::size_t;
using Load = std::int64_t;

inline constexpr NodeIndex kNoNode = std::numeric_limits<NodeIndex>::max();

/// One link of the input: `child` sends to `parent`; an empty parent means the
/// child is the root and the link goes to the destination.
struct EdgeSpec {
  std::string child;
  std::optional<std::string> parent;
  double rate = 1.0;
};

struct TreeMetrics {
  int height = 0;
  std::vector<NodeIndex> leaves;
  std::vector<std::size_t> level_sizes;
};

/// Rooted switch tree directed toward an implicit destination attached above
/// the root. Every switch owns exactly one uplink (to its parent, or to the
/// destination for the root), so per-edge quantities are indexed by the child
/// switch. Immutable once built.
class TreeNetwork {
 public:
  std::size_t size() const { return ids_.size(); }
  NodeIndex root() const { return root_; }

  const std::string& id(NodeIndex v) const { return ids_[v]; }
  std::optional<NodeIndex> find(const std::string& id) const;
  NodeIndex index_of(const std::string& id) const;

  /// kNoNode for the root (its parent is the destination).
  NodeIndex parent(NodeIndex v) const { return parent_[v]; }
  std::span<const NodeIndex> children(NodeIndex v) const { return children_[v]; }
  bool is_leaf(NodeIndex v) const { return children_[v].empty(); }

  double rate(NodeIndex v) const { return rate_[v]; }
  double inv_rate(NodeIndex v) const { return inv_rate_[v]; }
  Load load(NodeIndex v) const { return load_[v]; }
  bool available(NodeIndex v) const { return available_[v] != 0; }
  int depth(NodeIndex v) const { return depth_[v]; }
  int height() const { return height_; }

  std::span<const Load> loads() const { return load_; }
  Load total_load() const;
  std::size_t available_count() const;

  /// True when every link rate is exactly 1, so all costs are integers.
  bool unit_rates() const { return unit_rates_; }

  /// Sum of inverse rates over the first `hops` links above v.
  /// `hops` ranges over 0..depth(v)+1; depth(v)+1 reaches the destination.
  double rho_to_ancestor(NodeIndex v, int hops) const;
  double rho_to_destination(NodeIndex v) const {
    return rho_to_ancestor(v, depth_[v] + 1);
  }
  /// The ancestor `hops` links above v (v itself for 0, kNoNode for the
  /// destination).
  NodeIndex ancestor(NodeIndex v, int hops) const;

  const std::vector<NodeIndex>& post_order() const { return post_order_; }
  const std::vector<NodeIndex>& pre_order() const { return pre_order_; }

  TreeMetrics metrics() const;
  /// Every internal switch has two children and all leaves share a depth.
  bool is_complete_binary() const;

  TreeNetwork with_loads(std::span<const Load> loads) const;
  TreeNetwork with_availability(const std::vector<bool>& available) const;

  std::vector<EdgeSpec> edges() const;

  friend bool operator==(const TreeNetwork&, const TreeNetwork&) = default;

 private:
  friend TreeNetwork build_tree(std::span<const EdgeSpec>, const std::string&,
                                const std::unordered_map<std::string, Load>&,
                                const std::unordered_map<std::string, bool>&);

  void derive();

  std::vector<std::string> ids_;
  std::unordered_map<std::string, NodeIndex> index_;
  NodeIndex root_ = kNoNode;
  std::vector<NodeIndex> parent_;
  std::vector<std::vector<NodeIndex>> children_;
  std::vector<double> rate_;
  std::vector<double> inv_rate_;
  std::vector<Load> load_;
  std::vector<char> available_;
  std::vector<int> depth_;
  int height_ = 0;
  bool unit_rates_ = true;
  // Per node, rho over the path toward d: prefix_[offset_[v] + l] covers l links.
  std::vector<std::size_t> prefix_offset_;
  std::vector<double> prefix_;
  std::vector<NodeIndex> post_order_;
  std::vector<NodeIndex> pre_order_;
};

/// Validates and builds a tree. Children keep the order in which their edges
/// appear in `edges`. Switches missing from `loads` get load 0; switches
/// missing from `available` are available.
TreeNetwork build_tree(std::span<const EdgeSpec> edges, const std::string& root,
                       const std::unordered_map<std::string, Load>& loads = {},
                       const std::unordered_map<std::string, bool>& available = {});

// JSON topology files:
//   {"root": id, "nodes": [{"id", "parent", "rate", "load", "available"}]}
// A node without "parent" is the root; its "rate" is the root-destination link.
TreeNetwork parse_topology_json(const std::string& text);
TreeNetwork load_topology(const std::string& path);
std::string to_topology_json(const TreeNetwork& tree);
void save_topology(const TreeNetwork& tree, const std::string& path);

}  // namespace soar
