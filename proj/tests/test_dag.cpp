#include <doctest.h>

#include <numbers>
#include <queue>
#include <set>

#include <json.hpp>

#include "qtp/dag.hpp"
#include "qtp/error.hpp"
#include "qtp/io_util.hpp"
#include "test_util.hpp"

using namespace qtp;

namespace {

// For every op, scan backwards along each of its wires for the most recent
// node touching that wire (INPUT node if none).
std::set<std::pair<int, int>> wire_walk_edges(const Circuit& c) {
  std::set<std::pair<int, int>> edges;
  const auto& ops = c.ops();
  for (std::size_t j = 0; j < ops.size(); ++j) {
    for (int q : ops[j].qubits) {
      int pred = q;
      for (std::size_t i = j; i-- > 0;) {
        bool touches = false;
        for (int r : ops[i].qubits) touches = touches || r == q;
        if (touches) {
          pred = c.num_qubits() + static_cast<int>(i);
          break;
        }
      }
      edges.emplace(pred, c.num_qubits() + static_cast<int>(j));
    }
  }
  return edges;
}

double slot_sum(const FeatureVector& f, int lo, int hi) {
  double s = 0.0;
  for (int i = lo; i < hi; ++i) s += f[i];
  return s;
}

}  // namespace

TEST_CASE("input node features") {
  const auto f = encode_features(std::nullopt, std::vector<int>{0}, {});
  for (int i = 0; i < kFeatureSize; ++i) {
    CHECK(f[i] == ((i == kInputSlot || i == kQubitOffset) ? 1.0 : 0.0));
  }
}

TEST_CASE("rx(pi) on qubit 2") {
  const double theta = std::numbers::pi;
  const auto f = encode_features(GateKind::rx, std::vector<int>{2}, std::vector<double>{theta});
  CHECK(f[type_slot(GateKind::rx)] == 1.0);
  CHECK(f[38] == 1.0);
  CHECK(f[63] == theta / (2.0 * std::numbers::pi));
  CHECK(f[64] == 0.0);
  CHECK(slot_sum(f, 0, kTypeSlots) == 1.0);
}

TEST_CASE("cx on (0,1)") {
  const auto f = encode_features(GateKind::cx, std::vector<int>{0, 1}, {});
  CHECK(f[type_slot(GateKind::cx)] == 1.0);
  CHECK(f[36] == 1.0);
  CHECK(f[37] == 1.0);
  CHECK(slot_sum(f, kAngleOffset, kFeatureSize) == 0.0);
}

TEST_CASE("feature encoding rejects out-of-range qubits") {
  CHECK_THROWS_AS(encode_features(GateKind::x, std::vector<int>{27}, {}), DataError);
  CHECK_THROWS_AS(build_dag(Circuit(28)), DataError);
  CHECK_NOTHROW(build_dag(Circuit(27)));
}

TEST_CASE("angle encoding is periodic and lands in [0,1)") {
  Rng rng(17);
  for (int i = 0; i < 2000; ++i) {
    const double t = rng.uniform(-50.0, 50.0);
    const double a = normalize_angle(t);
    CHECK(a >= 0.0);
    CHECK(a < 1.0);
    CHECK(normalize_angle(t + 2 * std::numbers::pi) == a);
    CHECK(normalize_angle(t - 2 * std::numbers::pi) == a);
  }
  CHECK(normalize_angle(0.0) == 0.0);
  CHECK(normalize_angle(-std::numbers::pi / 2) == 0.75);
}

TEST_CASE("cx dag has three nodes and two edges") {
  Circuit c(2);
  c.add(GateKind::cx, {0, 1});
  const auto d = build_dag(c);
  CHECK(d.nodes.size() == 3);
  CHECK(d.edges == std::vector<std::pair<int, int>>{{0, 2}, {1, 2}});
}

TEST_CASE("h, cx, rx dag") {
  Circuit c(2);
  c.add(GateKind::h, {0});
  c.add(GateKind::cx, {0, 1});
  c.add(GateKind::rx, {0}, {0.5});
  const auto d = build_dag(c);
  std::vector<int> indeg(d.nodes.size(), 0);
  for (auto [u, v] : d.edges) ++indeg[v];
  CHECK(indeg[0] == 0);
  CHECK(indeg[1] == 0);
  for (std::size_t i = 2; i < indeg.size(); ++i) CHECK(indeg[i] > 0);
  CHECK(d.nodes[4].feature[63] > 0.0);
  for (int i = 0; i < 4; ++i) CHECK(slot_sum(d.nodes[i].feature, kAngleOffset, kFeatureSize) == 0.0);
}

TEST_CASE("repeated two-qubit gate produces one deduplicated edge") {
  Circuit c(2);
  c.add(GateKind::cx, {0, 1});
  c.add(GateKind::cz, {1, 0});
  const auto d = build_dag(c);
  CHECK(d.edges.size() == 3);
}

TEST_CASE("random circuits: node count, edges and structural invariants") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(8));
    const Circuit c = test::random_circuit(rng, n, 20);
    const auto d = build_dag(c);
    CHECK(d.nodes.size() == static_cast<std::size_t>(n + 20));

    const auto oracle = wire_walk_edges(c);
    const std::set<std::pair<int, int>> got(d.edges.begin(), d.edges.end());
    CHECK(got.size() == d.edges.size());
    CHECK(got == oracle);

    for (std::size_t i = 0; i < d.nodes.size(); ++i) {
      const auto& f = d.nodes[i].feature;
      CHECK(slot_sum(f, 0, kTypeSlots) == 1.0);
      const double expect_q = i < static_cast<std::size_t>(n) ? 1.0 : c.ops()[i - n].qubits.size();
      CHECK(slot_sum(f, kQubitOffset, kAngleOffset) == expect_q);
      for (int s = kAngleOffset; s < kFeatureSize; ++s) {
        CHECK(f[s] >= 0.0);
        CHECK(f[s] < 1.0);
      }
    }

    // Kahn's algorithm: acyclic, sources are exactly the INPUT nodes, and
    // every node is reached.
    std::vector<int> indeg(d.nodes.size(), 0);
    std::vector<std::vector<int>> out(d.nodes.size());
    for (auto [u, v] : d.edges) {
      ++indeg[v];
      out[u].push_back(v);
    }
    std::queue<int> q;
    for (std::size_t i = 0; i < indeg.size(); ++i) {
      if (indeg[i] == 0) {
        CHECK(i < static_cast<std::size_t>(n));
        CHECK(d.nodes[i].feature[kInputSlot] == 1.0);
        q.push(static_cast<int>(i));
      }
    }
    std::size_t seen = 0;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      ++seen;
      for (int v : out[u]) {
        if (--indeg[v] == 0) q.push(v);
      }
    }
    CHECK(seen == d.nodes.size());
  }
}

TEST_CASE("graph JSON round trip is byte-identical") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    Circuit c = test::random_circuit(rng, 4, 15, "g" + std::to_string(trial));
    auto d = build_dag(c);
    if (trial % 2 == 0) d.label = trial % 4 == 0 ? 0 : 1;
    const std::string a = to_graph_json(d);
    const auto back = from_graph_json(a);
    CHECK(back == d);
    CHECK(to_graph_json(back) == a);
  }
}

TEST_CASE("graph JSON layout") {
  Circuit c(2, "bell");
  c.add(GateKind::h, {0});
  auto d = build_dag(c);
  d.label = 0;
  const auto j = nlohmann::json::parse(to_graph_json(d));
  CHECK(j["nodes"].size() == 3);
  for (const auto& row : j["nodes"]) CHECK(row.size() == 66);
  CHECK(j["label"] == 0);
  CHECK(j["name"] == "bell");
  CHECK(j["num_qubits"] == 2);
  d.label.reset();
  CHECK_FALSE(nlohmann::json::parse(to_graph_json(d)).contains("label"));
}

TEST_CASE("malformed graph JSON is rejected") {
  CHECK_THROWS_AS(from_graph_json("{"), DataError);
  CHECK_THROWS_AS(from_graph_json(R"({"name":"x","num_qubits":1,"nodes":[[1,2]],"edges":[]})"), DataError);
  CHECK_THROWS_AS(from_graph_json(R"({"name":"x","num_qubits":1,"nodes":[],"edges":[[0,1]]})"), DataError);
}

TEST_CASE("save and load through files") {
  const auto dir = test::scratch_dir("dag");
  Circuit c(3, "f");
  c.add(GateKind::ccx, {0, 1, 2});
  const auto d = build_dag(c);
  save_dag(dir / "sub" / "f.dag.json", d);
  CHECK(load_dag(dir / "sub" / "f.dag.json") == d);
}
