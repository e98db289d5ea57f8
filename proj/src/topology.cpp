#include "soar/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "soar/error.hpp"

namespace soar {

namespace {

using json = nlohmann::json;

bool is_decimal(const std::string& s) {
  return !s.empty() && s.size() < 19 &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }) &&
         (s.size() == 1 || s[0] != '0');
}

std::string read_id(const json& value, const std::string& where) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_unsigned()) return std::to_string(value.get<std::uint64_t>());
  if (value.is_number_integer() && value.get<std::int64_t>() >= 0) {
    return std::to_string(value.get<std::int64_t>());
  }
  throw Error(ErrorCode::kParseError, where + ": id must be a string or non-negative integer");
}

json write_id(const std::string& id) {
  if (is_decimal(id)) return json(std::stoull(id));
  return json(id);
}

}  // namespace

std::optional<NodeIndex> TreeNetwork::find(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeIndex TreeNetwork::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw Error(ErrorCode::kInvalidArgument, "unknown switch '" + id + "'");
  }
  return it->second;
}

Load TreeNetwork::total_load() const {
  Load total = 0;
  for (Load l : load_) total += l;
  return total;
}

std::size_t TreeNetwork::available_count() const {
  return static_cast<std::size_t>(std::count(available_.begin(), available_.end(), 1));
}

double TreeNetwork::rho_to_ancestor(NodeIndex v, int hops) const {
  if (hops < 0 || hops > depth_[v] + 1) {
    throw Error(ErrorCode::kOutOfRangeDistance,
                "distance " + std::to_string(hops) + " above '" + ids_[v] +
                    "' (depth " + std::to_string(depth_[v]) + ")");
  }
  return prefix_[prefix_offset_[v] + static_cast<std::size_t>(hops)];
}

NodeIndex TreeNetwork::ancestor(NodeIndex v, int hops) const {
  if (hops < 0 || hops > depth_[v] + 1) {
    throw Error(ErrorCode::kOutOfRangeDistance,
                "ancestor " + std::to_string(hops) + " above '" + ids_[v] + "'");
  }
  for (int h = 0; h < hops && v != kNoNode; ++h) v = parent_[v];
  return v;
}

TreeMetrics TreeNetwork::metrics() const {
  TreeMetrics m;
  m.height = height_;
  m.level_sizes.assign(static_cast<std::size_t>(height_) + 1, 0);
  for (NodeIndex v : pre_order_) {
    ++m.level_sizes[static_cast<std::size_t>(depth_[v])];
    if (children_[v].empty()) m.leaves.push_back(v);
  }
  return m;
}

bool TreeNetwork::is_complete_binary() const {
  for (NodeIndex v = 0; v < size(); ++v) {
    if (children_[v].empty()) {
      if (depth_[v] != height_) return false;
    } else if (children_[v].size() != 2) {
      return false;
    }
  }
  return true;
}

TreeNetwork TreeNetwork::with_loads(std::span<const Load> loads) const {
  if (loads.size() != size()) {
    throw Error(ErrorCode::kInvalidArgument, "load vector size does not match switch count");
  }
  TreeNetwork copy = *this;
  for (std::size_t v = 0; v < loads.size(); ++v) {
    if (loads[v] < 0) {
      throw Error(ErrorCode::kInvalidArgument, "negative load at '" + ids_[v] + "'");
    }
    copy.load_[v] = loads[v];
  }
  return copy;
}

TreeNetwork TreeNetwork::with_availability(const std::vector<bool>& available) const {
  if (available.size() != size()) {
    throw Error(ErrorCode::kInvalidArgument, "availability vector size does not match switch count");
  }
  TreeNetwork copy = *this;
  for (std::size_t v = 0; v < available.size(); ++v) copy.available_[v] = available[v] ? 1 : 0;
  return copy;
}

std::vector<EdgeSpec> TreeNetwork::edges() const {
  std::vector<EdgeSpec> out;
  out.reserve(size());
  for (NodeIndex v = 0; v < size(); ++v) {
    EdgeSpec e;
    e.child = ids_[v];
    if (parent_[v] != kNoNode) e.parent = ids_[parent_[v]];
    e.rate = rate_[v];
    out.push_back(std::move(e));
  }
  return out;
}

void TreeNetwork::derive() {
  const std::size_t n = size();
  inv_rate_.resize(n);
  unit_rates_ = true;
  for (NodeIndex v = 0; v < n; ++v) {
    inv_rate_[v] = 1.0 / rate_[v];
    if (rate_[v] != 1.0) unit_rates_ = false;
  }

  pre_order_.clear();
  pre_order_.reserve(n);
  depth_.assign(n, 0);
  std::vector<NodeIndex> stack{root_};
  while (!stack.empty()) {
    NodeIndex v = stack.back();
    stack.pop_back();
    pre_order_.push_back(v);
    const auto& kids = children_[v];
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
      depth_[*it] = depth_[v] + 1;
      stack.push_back(*it);
    }
  }

  // Children-before-parent order that visits siblings left to right.
  post_order_.clear();
  post_order_.reserve(n);
  std::vector<std::pair<NodeIndex, std::size_t>> frames{{root_, 0}};
  while (!frames.empty()) {
    auto& [v, next] = frames.back();
    if (next < children_[v].size()) {
      NodeIndex c = children_[v][next++];
      frames.emplace_back(c, 0);
    } else {
      post_order_.push_back(v);
      frames.pop_back();
    }
  }

  height_ = 0;
  for (int d : depth_) height_ = std::max(height_, d);

  prefix_offset_.assign(n, 0);
  std::size_t total = 0;
  for (NodeIndex v = 0; v < n; ++v) {
    prefix_offset_[v] = total;
    total += static_cast<std::size_t>(depth_[v]) + 2;
  }
  prefix_.assign(total, 0.0);
  for (NodeIndex v = 0; v < n; ++v) {
    double* p = &prefix_[prefix_offset_[v]];
    p[0] = 0.0;
    NodeIndex u = v;
    for (int l = 1; l <= depth_[v] + 1; ++l) {
      p[l] = p[l - 1] + inv_rate_[u];
      u = parent_[u];
    }
  }
}

TreeNetwork build_tree(std::span<const EdgeSpec> edges, const std::string& root,
                       const std::unordered_map<std::string, Load>& loads,
                       const std::unordered_map<std::string, bool>& available) {
  if (edges.empty()) throw Error(ErrorCode::kInvalidArgument, "edge list is empty");

  TreeNetwork t;
  const std::size_t n = edges.size();
  t.ids_.reserve(n);
  for (const EdgeSpec& e : edges) {
    if (!t.index_.emplace(e.child, t.ids_.size()).second) {
      throw Error(ErrorCode::kDuplicateParent, "switch '" + e.child + "' has more than one uplink");
    }
    t.ids_.push_back(e.child);
  }

  t.rate_.resize(n);
  t.parent_.assign(n, kNoNode);
  t.children_.assign(n, {});
  for (std::size_t v = 0; v < n; ++v) {
    const EdgeSpec& e = edges[v];
    if (!(e.rate > 0.0) || !std::isfinite(e.rate)) {
      throw Error(ErrorCode::kNonPositiveRate, "uplink of '" + e.child + "' has rate " +
                                                   std::to_string(e.rate));
    }
    t.rate_[v] = e.rate;
    if (e.parent) {
      auto it = t.index_.find(*e.parent);
      if (it == t.index_.end()) {
        throw Error(ErrorCode::kDisconnectedNode,
                    "parent '" + *e.parent + "' of '" + e.child + "' is not a switch");
      }
      if (it->second == v) {
        throw Error(ErrorCode::kCycleDetected, "switch '" + e.child + "' is its own parent");
      }
      t.parent_[v] = it->second;
    }
  }

  // Walk parent links; revisiting a switch on the current walk is a cycle.
  std::vector<int> state(n, 0);  // 0 unseen, 1 on walk, 2 done
  std::vector<NodeIndex> walk;
  for (NodeIndex s = 0; s < n; ++s) {
    walk.clear();
    NodeIndex v = s;
    while (v != kNoNode && state[v] == 0) {
      state[v] = 1;
      walk.push_back(v);
      v = t.parent_[v];
    }
    if (v != kNoNode && state[v] == 1) {
      throw Error(ErrorCode::kCycleDetected, "parent links through '" + t.ids_[v] + "' form a cycle");
    }
    for (NodeIndex w : walk) state[w] = 2;
  }

  auto root_it = t.index_.find(root);
  if (root_it == t.index_.end()) {
    throw Error(ErrorCode::kUnknownRoot, "root '" + root + "' is not a switch");
  }
  t.root_ = root_it->second;
  if (t.parent_[t.root_] != kNoNode) {
    throw Error(ErrorCode::kUnknownRoot, "root '" + root + "' has parent '" +
                                             t.ids_[t.parent_[t.root_]] + "'");
  }
  for (NodeIndex v = 0; v < n; ++v) {
    if (t.parent_[v] == kNoNode && v != t.root_) {
      throw Error(ErrorCode::kDisconnectedNode,
                  "switch '" + t.ids_[v] + "' has no parent and is not the root");
    }
    if (t.parent_[v] != kNoNode) t.children_[t.parent_[v]].push_back(v);
  }
  // With a unique parentless switch and no cycles every walk ends at the root,
  // so the tree is connected.

  t.load_.assign(n, 0);
  for (const auto& [id, load] : loads) {
    auto it = t.index_.find(id);
    if (it == t.index_.end()) {
      throw Error(ErrorCode::kInvalidArgument, "load given for unknown switch '" + id + "'");
    }
    if (load < 0) throw Error(ErrorCode::kInvalidArgument, "negative load at '" + id + "'");
    t.load_[it->second] = load;
  }
  t.available_.assign(n, 1);
  for (const auto& [id, flag] : available) {
    auto it = t.index_.find(id);
    if (it == t.index_.end()) {
      throw Error(ErrorCode::kInvalidArgument, "availability given for unknown switch '" + id + "'");
    }
    t.available_[it->second] = flag ? 1 : 0;
  }

  t.derive();
  return t;
}

TreeNetwork parse_topology_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::kParseError, "topology must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "root" && key != "nodes") {
      throw Error(ErrorCode::kParseError, "unknown top-level key '" + key + "'");
    }
  }
  if (!doc.contains("root")) throw Error(ErrorCode::kParseError, "missing 'root'");
  if (!doc.contains("nodes") || !doc["nodes"].is_array()) {
    throw Error(ErrorCode::kParseError, "missing 'nodes' array");
  }
  const std::string root = read_id(doc["root"], "root");

  std::vector<EdgeSpec> edges;
  std::unordered_map<std::string, Load> loads;
  std::unordered_map<std::string, bool> available;
  std::size_t position = 0;
  for (const json& node : doc["nodes"]) {
    const std::string where = "nodes[" + std::to_string(position++) + "]";
    if (!node.is_object()) throw Error(ErrorCode::kParseError, where + " is not an object");
    if (!node.contains("id")) throw Error(ErrorCode::kParseError, where + " has no 'id'");
    EdgeSpec e;
    e.child = read_id(node["id"], where);
    const std::string label = "node '" + e.child + "'";
    for (const auto& [key, value] : node.items()) {
      if (key == "id") {
        continue;
      } else if (key == "parent") {
        if (!value.is_null()) e.parent = read_id(value, label);
      } else if (key == "rate") {
        if (!value.is_number()) throw Error(ErrorCode::kParseError, label + ": 'rate' must be a number");
        e.rate = value.get<double>();
      } else if (key == "load") {
        if (!value.is_number_integer() || value.get<std::int64_t>() < 0) {
          throw Error(ErrorCode::kParseError, label + ": 'load' must be a non-negative integer");
        }
        loads[e.child] = value.get<Load>();
      } else if (key == "available") {
        if (!value.is_boolean()) throw Error(ErrorCode::kParseError, label + ": 'available' must be a boolean");
        available[e.child] = value.get<bool>();
      } else {
        throw Error(ErrorCode::kParseError, label + ": unknown key '" + key + "'");
      }
    }
    if (!node.contains("rate")) throw Error(ErrorCode::kParseError, label + ": missing 'rate'");
    edges.push_back(std::move(e));
  }
  if (edges.empty()) throw Error(ErrorCode::kParseError, "'nodes' is empty");
  return build_tree(edges, root, loads, available);
}

TreeNetwork load_topology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open topology file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_topology_json(buffer.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.message());
  }
}

std::string to_topology_json(const TreeNetwork& tree) {
  json nodes = json::array();
  for (NodeIndex v = 0; v < tree.size(); ++v) {
    json node;
    node["id"] = write_id(tree.id(v));
    if (tree.parent(v) != kNoNode) node["parent"] = write_id(tree.id(tree.parent(v)));
    node["rate"] = tree.rate(v);
    node["load"] = tree.load(v);
    node["available"] = tree.available(v);
    nodes.push_back(std::move(node));
  }
  json doc;
  doc["root"] = write_id(tree.id(tree.root()));
  doc["nodes"] = std::move(nodes);
  return doc.dump(2);
}

void save_topology(const TreeNetwork& tree, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + path + "'");
  out << to_topology_json(tree) << '\n';
}

}  // namespace soar
