#include "soar/reduce.hpp"

#include <algorithm>
#include <memory>
#include <ostream>

#include "soar/error.hpp"

namespace soar {

Placement::Placement(std::vector<NodeIndex> blue) : blue_(std::move(blue)) {
  std::sort(blue_.begin(), blue_.end());
  blue_.erase(std::unique(blue_.begin(), blue_.end()), blue_.end());
}

Placement Placement::from_ids(const TreeNetwork& tree, std::span<const std::string> ids) {
  std::vector<NodeIndex> nodes;
  nodes.reserve(ids.size());
  for (const auto& id : ids) nodes.push_back(tree.index_of(id));
  return Placement(std::move(nodes));
}

Placement Placement::all_available(const TreeNetwork& tree) {
  std::vector<NodeIndex> nodes;
  for (NodeIndex v = 0; v < tree.size(); ++v) {
    if (tree.available(v)) nodes.push_back(v);
  }
  return Placement(std::move(nodes));
}

bool Placement::contains(NodeIndex v) const {
  return std::binary_search(blue_.begin(), blue_.end(), v);
}

std::vector<char> Placement::mask(std::size_t node_count) const {
  std::vector<char> m(node_count, 0);
  for (NodeIndex v : blue_) {
    if (v >= node_count) throw Error(ErrorCode::kInvalidArgument, "placement index out of range");
    m[v] = 1;
  }
  return m;
}

std::vector<std::string> Placement::ids(const TreeNetwork& tree) const {
  std::vector<std::string> out;
  out.reserve(blue_.size());
  for (NodeIndex v : blue_) out.push_back(tree.id(v));
  return out;
}

void check_placement(const TreeNetwork& tree, const Placement& blue) {
  for (NodeIndex v : blue.nodes()) {
    if (v >= tree.size()) throw Error(ErrorCode::kInvalidArgument, "placement index out of range");
    if (!tree.available(v)) {
      throw Error(ErrorCode::kBlueNotAvailable, "switch '" + tree.id(v) + "' is not available");
    }
  }
}

EdgeUtilization simulate_reduce(const TreeNetwork& tree, const Placement& blue) {
  check_placement(tree, blue);
  const auto is_blue = blue.mask(tree.size());
  EdgeUtilization out;
  out.msg.assign(tree.size(), 0);
  out.cost.assign(tree.size(), 0.0);
  for (NodeIndex v : tree.post_order()) {
    std::int64_t sent;
    if (is_blue[v]) {
      sent = 1;
    } else {
      sent = tree.load(v);
      for (NodeIndex c : tree.children(v)) sent += out.msg[c];
    }
    out.msg[v] = sent;
    out.cost[v] = static_cast<double>(sent) * tree.inv_rate(v);
  }
  for (NodeIndex v : tree.post_order()) out.total += out.cost[v];
  return out;
}

double utilization_barrier(const TreeNetwork& tree, const Placement& blue) {
  check_placement(tree, blue);
  const auto is_blue = blue.mask(tree.size());
  // hops[v]: links from v up to its closest blue ancestor, or to d.
  std::vector<int> hops(tree.size(), 0);
  double total = 0.0;
  for (NodeIndex v : tree.pre_order()) {
    const NodeIndex p = tree.parent(v);
    hops[v] = (p == kNoNode) ? 1 : (is_blue[p] ? 1 : hops[p] + 1);
    const double distance = tree.rho_to_ancestor(v, hops[v]);
    total += is_blue[v] ? distance : static_cast<double>(tree.load(v)) * distance;
  }
  return total;
}

std::string_view to_string(PayloadKind kind) {
  switch (kind) {
    case PayloadKind::kUnit: return "unit";
    case PayloadKind::kWordCount: return "wordcount";
    case PayloadKind::kGradient: return "gradient";
  }
  return "unknown";
}

namespace {

using Message = std::shared_ptr<const KeySet>;

KeySet merge_keys(std::span<const Message> messages) {
  std::size_t total = 0;
  for (const auto& m : messages) total += m->size();
  KeySet merged;
  merged.reserve(total);
  for (const auto& m : messages) merged.insert(merged.end(), m->begin(), m->end());
  std::sort(merged.begin(), merged.end());
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  return merged;
}

}  // namespace

ByteUtilization simulate_bytes(const TreeNetwork& tree, const Placement& blue,
                               const PayloadModel& model) {
  check_placement(tree, blue);
  const auto servers = static_cast<std::size_t>(tree.total_load());
  const bool content_free = model.kind == PayloadKind::kUnit && model.server_payloads.empty();
  if (!content_free && model.server_payloads.size() != servers) {
    throw Error(ErrorCode::kPayloadCountMismatch,
                "model has " + std::to_string(model.server_payloads.size()) +
                    " payloads for " + std::to_string(servers) + " servers");
  }

  // Slot offset of each switch's first server.
  std::vector<std::size_t> first_slot(tree.size(), 0);
  std::size_t slot = 0;
  for (NodeIndex v = 0; v < tree.size(); ++v) {
    first_slot[v] = slot;
    slot += static_cast<std::size_t>(tree.load(v));
  }
  const auto empty = std::make_shared<const KeySet>();
  std::vector<Message> server_messages;
  if (!content_free) {
    server_messages.reserve(servers);
    for (const auto& keys : model.server_payloads) {
      server_messages.push_back(std::make_shared<const KeySet>(keys));
    }
  }

  const auto is_blue = blue.mask(tree.size());
  const auto message_bytes = [&](const Message& m) -> std::uint64_t {
    if (model.kind == PayloadKind::kUnit) return model.entry_bytes;
    return static_cast<std::uint64_t>(model.entry_bytes) * m->size();
  };

  std::vector<std::vector<Message>> outgoing(tree.size());
  ByteUtilization out;
  out.bytes.assign(tree.size(), 0);
  for (NodeIndex v : tree.post_order()) {
    std::vector<Message> incoming;
    for (NodeIndex c : tree.children(v)) {
      auto& from_child = outgoing[c];
      incoming.insert(incoming.end(), std::make_move_iterator(from_child.begin()),
                      std::make_move_iterator(from_child.end()));
      from_child.clear();
      from_child.shrink_to_fit();
    }
    for (std::size_t s = 0; s < static_cast<std::size_t>(tree.load(v)); ++s) {
      incoming.push_back(content_free ? empty : server_messages[first_slot[v] + s]);
    }
    if (is_blue[v]) {
      outgoing[v] = {std::make_shared<const KeySet>(merge_keys(incoming))};
    } else {
      outgoing[v] = std::move(incoming);
    }
    std::uint64_t bytes = 0;
    for (const auto& m : outgoing[v]) bytes += message_bytes(m);
    out.bytes[v] = bytes;
    out.total += bytes;
  }
  return out;
}

void write_edge_csv(std::ostream& out, const TreeNetwork& tree, const EdgeUtilization& util,
                    const ByteUtilization* bytes) {
  out << "child_id,parent_id,msg,cost,bytes\n";
  for (NodeIndex v : tree.pre_order()) {
    const NodeIndex p = tree.parent(v);
    out << tree.id(v) << ',' << (p == kNoNode ? std::string("d") : tree.id(p)) << ','
        << util.msg[v] << ',' << util.cost[v] << ',';
    if (bytes) out << bytes->bytes[v];
    out << '\n';
  }
}

}  // namespace soar
