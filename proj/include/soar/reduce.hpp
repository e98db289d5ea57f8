#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "soar/topology.hpp"

namespace soar {

/// The set of aggregating (blue) switches.
class Placement {
 public:
  Placement() = default;
  explicit Placement(std::vector<NodeIndex> blue);

  static Placement from_ids(const TreeNetwork& tree, std::span<const std::string> ids);
  static Placement all_available(const TreeNetwork& tree);

  bool contains(NodeIndex v) const;
  std::size_t size() const { return blue_.size(); }
  bool empty() const { return blue_.empty(); }
  const std::vector<NodeIndex>& nodes() const { return blue_; }
  std::vector<char> mask(std::size_t node_count) const;
  std::vector<std::string> ids(const TreeNetwork& tree) const;

  friend bool operator==(const Placement&, const Placement&) = default;

 private:
  std::vector<NodeIndex> blue_;  // sorted, unique
};

/// Per-uplink message counts and transmission cost; index = child switch.
struct EdgeUtilization {
  std::vector<std::int64_t> msg;
  std::vector<double> cost;
  double total = 0.0;
};

/// Throws BlueNotAvailable when a blue switch is outside the available set.
void check_placement(const TreeNetwork& tree, const Placement& blue);

/// Message-level Reduce: a red switch forwards every incoming message plus one
/// per attached server; a blue switch sends exactly one message.
EdgeUtilization simulate_reduce(const TreeNetwork& tree, const Placement& blue);

/// The same objective written per switch: every blue switch pays the rho
/// distance to its closest blue ancestor (or d) once, every red switch pays it
/// once per attached server.
double utilization_barrier(const TreeNetwork& tree, const Placement& blue);

// ---- byte-level simulation ----

enum class PayloadKind { kUnit, kWordCount, kGradient };

std::string_view to_string(PayloadKind kind);

/// Sorted, duplicate-free key support of one message.
using KeySet = std::vector<std::uint32_t>;

/// Message contents for every server slot. Slots are enumerated switch by
/// switch in index order, load(v) slots per switch. Merging two payloads
/// unions their keys; a message costs entry_bytes per key (per message for
/// the unit model).
struct PayloadModel {
  PayloadKind kind = PayloadKind::kUnit;
  std::uint32_t entry_bytes = 8;
  std::vector<KeySet> server_payloads;
  // Informational; merged messages are allowed to exceed it.
  std::optional<std::uint64_t> max_message_bytes;
};

struct ByteUtilization {
  std::vector<std::uint64_t> bytes;  // per uplink
  std::uint64_t total = 0;
};

ByteUtilization simulate_bytes(const TreeNetwork& tree, const Placement& blue,
                               const PayloadModel& model);

/// Rows "child_id,parent_id,msg,cost,bytes"; parent of the root is "d".
void write_edge_csv(std::ostream& out, const TreeNetwork& tree, const EdgeUtilization& util,
                    const ByteUtilization* bytes = nullptr);

}  // namespace soar
