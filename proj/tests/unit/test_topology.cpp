#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>

#include "oracle.hpp"
#include "soar/error.hpp"
#include "soar/topology.hpp"

using namespace soar;
using soar::testing::five_switch_tree;
using soar::testing::seven_switch_tree;

namespace {

ErrorCode build_error(const std::vector<EdgeSpec>& edges, const std::string& root) {
  try {
    build_tree(edges, root);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected build_tree to throw");
  return ErrorCode::kInvalidArgument;
}

ErrorCode parse_error(const std::string& text) {
  try {
    parse_topology_json(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected parse to throw");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("topology: structure of the five switch tree") {
  const TreeNetwork t = five_switch_tree();
  CHECK(t.size() == 5);
  CHECK(t.id(t.root()) == "r");
  CHECK(t.parent(t.root()) == kNoNode);
  CHECK(t.height() == 2);
  CHECK(t.depth(t.index_of("D")) == 2);
  CHECK(t.children(t.index_of("r")).size() == 3);
  CHECK(t.is_leaf(t.index_of("A")));
  CHECK_FALSE(t.is_leaf(t.index_of("C")));
  CHECK(t.total_load() == 6);
  CHECK(t.available_count() == 5);
  CHECK(t.unit_rates());
  CHECK_FALSE(t.find("zz").has_value());
  CHECK_THROWS_AS(t.index_of("zz"), Error);

  const TreeMetrics m = t.metrics();
  CHECK(m.height == 2);
  CHECK(m.leaves.size() == 3);
  CHECK(m.level_sizes == std::vector<std::size_t>{1, 3, 1});
}

TEST_CASE("topology: children precede parents in post order") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const TreeNetwork t = soar::testing::random_instance(rng);
    std::vector<std::size_t> post_pos(t.size());
    std::vector<std::size_t> pre_pos(t.size());
    REQUIRE(t.post_order().size() == t.size());
    REQUIRE(t.pre_order().size() == t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      post_pos[t.post_order()[i]] = i;
      pre_pos[t.pre_order()[i]] = i;
    }
    CHECK(t.post_order().back() == t.root());
    CHECK(t.pre_order().front() == t.root());
    for (NodeIndex v = 0; v < t.size(); ++v) {
      for (NodeIndex c : t.children(v)) {
        CHECK(post_pos[c] < post_pos[v]);
        CHECK(pre_pos[c] > pre_pos[v]);
        CHECK(t.parent(c) == v);
        CHECK(t.depth(c) == t.depth(v) + 1);
      }
    }
  }
}

TEST_CASE("topology: rho distances") {
  // Depth-3 leaf under exponential rates 1, 2, 4, 8 toward d.
  std::vector<EdgeSpec> edges{{"r", std::nullopt, 8.0}, {"x", "r", 4.0}, {"y", "x", 2.0},
                              {"z", "y", 1.0}};
  const TreeNetwork t = build_tree(edges, "r");
  const NodeIndex z = t.index_of("z");
  CHECK_FALSE(t.unit_rates());
  CHECK(t.rho_to_ancestor(z, 0) == 0.0);
  CHECK(t.rho_to_ancestor(z, 1) == 1.0);
  CHECK(t.rho_to_ancestor(z, 3) == 1.75);
  CHECK(t.rho_to_destination(z) == 1.875);
  CHECK(t.ancestor(z, 2) == t.index_of("x"));
  CHECK(t.ancestor(z, 4) == kNoNode);
  CHECK_THROWS_AS(t.rho_to_ancestor(z, 5), Error);
  CHECK_THROWS_AS(t.rho_to_ancestor(z, -1), Error);
  try {
    t.rho_to_ancestor(t.root(), 2);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kOutOfRangeDistance);
  }

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const TreeNetwork r = soar::testing::random_instance(rng);
    for (NodeIndex v = 0; v < r.size(); ++v) {
      for (int l = 0; l <= r.depth(v) + 1; ++l) {
        CHECK(soar::testing::close_enough(r.rho_to_ancestor(v, l), soar::testing::rho_walk(r, v, l),
                                          false));
      }
    }
  }
}

TEST_CASE("topology: validation errors") {
  CHECK(build_error({{"r", std::nullopt, 1}, {"a", "r", 1}, {"a", "r", 1}}, "r") ==
        ErrorCode::kDuplicateParent);
  CHECK(build_error({{"r", std::nullopt, 1}, {"a", "r", 0}}, "r") == ErrorCode::kNonPositiveRate);
  CHECK(build_error({{"r", std::nullopt, 1}, {"a", "r", -3}}, "r") == ErrorCode::kNonPositiveRate);
  CHECK(build_error({{"r", std::nullopt, 1}, {"a", "q", 1}}, "r") == ErrorCode::kDisconnectedNode);
  CHECK(build_error({{"r", std::nullopt, 1}, {"a", "a", 1}}, "r") == ErrorCode::kCycleDetected);
  CHECK(build_error({{"r", std::nullopt, 1}, {"a", "b", 1}, {"b", "a", 1}}, "r") ==
        ErrorCode::kCycleDetected);
  CHECK(build_error({{"r", std::nullopt, 1}, {"a", "r", 1}}, "x") == ErrorCode::kUnknownRoot);
  CHECK(build_error({{"r", "a", 1}, {"a", std::nullopt, 1}}, "r") == ErrorCode::kUnknownRoot);
  CHECK(build_error({{"r", std::nullopt, 1}, {"a", std::nullopt, 1}}, "r") ==
        ErrorCode::kDisconnectedNode);
  CHECK_THROWS_AS(build_tree(std::vector<EdgeSpec>{{"r", std::nullopt, 1}}, "r", {{"r", -1}}), Error);
  CHECK_THROWS_AS(build_tree(std::vector<EdgeSpec>{{"r", std::nullopt, 1}}, "r", {{"q", 1}}), Error);
}

TEST_CASE("topology: JSON parse errors") {
  CHECK(parse_error("{") == ErrorCode::kParseError);
  CHECK(parse_error("[]") == ErrorCode::kParseError);
  CHECK(parse_error(R"({"nodes": []})") == ErrorCode::kParseError);
  CHECK(parse_error(R"({"root": "r", "nodes": [{"id": "r"}]})") == ErrorCode::kParseError);
  CHECK(parse_error(R"({"root": "r", "nodes": [{"id": "r", "rate": 1, "colour": 2}]})") ==
        ErrorCode::kParseError);
  CHECK(parse_error(R"({"root": "r", "nodes": [{"id": "r", "rate": 1, "load": -2}]})") ==
        ErrorCode::kParseError);
  CHECK(parse_error(R"({"root": "r", "nodes": [{"id": "r", "rate": 1},
                        {"id": "s7", "parent": "r", "rate": 0}]})") == ErrorCode::kNonPositiveRate);
  try {
    parse_topology_json(R"({"root": "r", "nodes": [{"id": "r", "rate": 1},
                           {"id": "spine7", "parent": "r", "rate": 1, "weight": 1}]})");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("spine7") != std::string::npos);
  }
}

TEST_CASE("topology: JSON round trip") {
  const std::string text = R"({"root": 0, "nodes": [
      {"id": 0, "rate": 2.5},
      {"id": 1, "parent": 0, "rate": 1, "load": 3},
      {"id": "tor", "parent": 0, "rate": 0.5, "load": 0, "available": false}]})";
  const TreeNetwork t = parse_topology_json(text);
  CHECK(t.id(t.root()) == "0");
  CHECK_FALSE(t.available(t.index_of("tor")));
  CHECK(t.rate(t.root()) == 2.5);
  CHECK(t.load(t.index_of("1")) == 3);
  CHECK(parse_topology_json(to_topology_json(t)) == t);

  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const TreeNetwork r = soar::testing::random_instance(rng);
    CHECK(parse_topology_json(to_topology_json(r)) == r);
  }

  const auto path = std::filesystem::temp_directory_path() / "soar_topology_roundtrip.json";
  save_topology(t, path.string());
  CHECK(load_topology(path.string()) == t);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_topology("/nonexistent/dir/file.json"), Error);
}

TEST_CASE("topology: complete binary detection and copies") {
  const TreeNetwork seven = seven_switch_tree();
  CHECK(seven.is_complete_binary());
  CHECK_FALSE(five_switch_tree().is_complete_binary());

  std::vector<Load> loads(seven.size(), 1);
  const TreeNetwork reloaded = seven.with_loads(loads);
  CHECK(reloaded.total_load() == 7);
  CHECK(seven.total_load() == 17);
  loads.pop_back();
  CHECK_THROWS_AS(seven.with_loads(loads), Error);

  std::vector<bool> mask(seven.size(), false);
  mask[seven.index_of("a2")] = true;
  const TreeNetwork restricted = seven.with_availability(mask);
  CHECK(restricted.available_count() == 1);
  CHECK(restricted.available(restricted.index_of("a2")));
}
