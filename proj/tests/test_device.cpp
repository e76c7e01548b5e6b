#include <doctest.h>

#include <limits>
#include <queue>
#include <set>

#include "qtp/device.hpp"
#include "qtp/error.hpp"
#include "test_util.hpp"

using namespace qtp;
using nlohmann::json;

namespace {

DeviceProfile bundled(const std::string& name) {
  return load_profile_file(test::source_dir() / "profiles" / (name + ".json"));
}

json line_doc(int n) {
  json pairs = json::array();
  for (int i = 0; i + 1 < n; ++i) pairs.push_back({i, i + 1});
  return {{"name", "line"},
          {"technology", "superconducting"},
          {"num_qubits", n},
          {"basis_gates", {"cx", "rz", "sx", "x"}},
          {"coupling", pairs},
          {"fidelity_1q", {{"rz", 1.0}, {"sx", 0.999}, {"x", 0.999}}},
          {"fidelity_2q", 0.99}};
}

// Unit-weight Dijkstra with a binary heap, independent of the BFS table.
std::vector<int> dijkstra(int n, const std::vector<std::pair<int, int>>& edges, int src) {
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  const int inf = std::numeric_limits<int>::max();
  std::vector<int> dist(n, inf);
  using Item = std::pair<int, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[src] = 0;
  pq.emplace(0, src);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    for (int v : adj[u]) {
      if (d + 1 < dist[v]) {
        dist[v] = d + 1;
        pq.emplace(dist[v], v);
      }
    }
  }
  return dist;
}

std::vector<std::pair<int, int>> random_connected_edges(Rng& rng, int n) {
  std::vector<std::pair<int, int>> edges;
  for (int v = 1; v < n; ++v) edges.emplace_back(static_cast<int>(rng.below(v)), v);
  const int extra = static_cast<int>(rng.below(n));
  for (int i = 0; i < extra; ++i) {
    const int a = static_cast<int>(rng.below(n));
    const int b = static_cast<int>(rng.below(n));
    if (a == b) continue;
    bool dup = false;
    for (auto [x, y] : edges) dup = dup || (x == a && y == b) || (x == b && y == a);
    if (!dup) edges.emplace_back(a, b);
  }
  return edges;
}

}  // namespace

TEST_CASE("bundled trapped-ion profile") {
  const auto p = bundled("ionq-forte-like");
  CHECK(p.technology() == Technology::TrappedIon);
  CHECK(p.num_qubits() == 36);
  CHECK(p.all_to_all());
  CHECK(p.gate_fidelity(GateKind::rxx, std::vector<int>{0, 35}) == 0.996);
  for (auto g : {GateKind::rx, GateKind::ry, GateKind::rz}) {
    CHECK(p.gate_fidelity(g, std::vector<int>{7}) == 0.9998);
  }
}

TEST_CASE("bundled superconducting profile") {
  const auto p = bundled("ibm-eagle-like");
  CHECK(p.technology() == Technology::Superconducting);
  CHECK(p.num_qubits() == 127);
  std::set<GateKind> basis(p.basis_gates().begin(), p.basis_gates().end());
  CHECK(basis == std::set<GateKind>{GateKind::ecr, GateKind::id, GateKind::rz, GateKind::sx, GateKind::x});
  CHECK(p.connected());
  CHECK_FALSE(p.all_to_all());
  for (int q = 0; q < p.num_qubits(); ++q) {
    CHECK(p.neighbors(q).size() >= 1);
    CHECK(p.neighbors(q).size() <= 3);
  }
}

TEST_CASE("fidelity outside (0,1] is a schema error") {
  auto doc = line_doc(3);
  doc["fidelity_1q"]["sx"] = 1.2;
  CHECK_THROWS_AS(load_profile(doc), DataError);
  doc = line_doc(3);
  doc["fidelity_2q"] = 0.0;
  CHECK_THROWS_AS(load_profile(doc), DataError);
}

TEST_CASE("other schema violations") {
  auto doc = line_doc(3);
  doc["basis_gates"].push_back("warp");
  CHECK_THROWS_AS(load_profile(doc), DataError);
  doc = line_doc(3);
  doc["coupling"].push_back({1, 1});
  CHECK_THROWS_AS(load_profile(doc), DataError);
  doc = line_doc(3);
  doc["coupling"].push_back({0, 3});
  CHECK_THROWS_AS(load_profile(doc), DataError);
  doc = line_doc(3);
  doc.erase("num_qubits");
  CHECK_THROWS_AS(load_profile(doc), DataError);
  doc = line_doc(3);
  doc["technology"] = "photonic";
  CHECK_THROWS_AS(load_profile(doc), DataError);
}

TEST_CASE("per-edge and per-qubit overrides") {
  auto doc = line_doc(3);
  doc["fidelity_2q"] = {{"default", 0.99}, {"0-1", 0.97}};
  doc["fidelity_1q_overrides"] = {{"sx:2", 0.95}};
  const auto p = load_profile(doc);
  CHECK(p.gate_fidelity(GateKind::cx, std::vector<int>{0, 1}) == 0.97);
  CHECK(p.gate_fidelity(GateKind::cx, std::vector<int>{1, 0}) == 0.97);
  CHECK(p.gate_fidelity(GateKind::cx, std::vector<int>{1, 2}) == 0.99);
  CHECK(p.gate_fidelity(GateKind::sx, std::vector<int>{2}) == 0.95);
  CHECK(p.gate_fidelity(GateKind::sx, std::vector<int>{1}) == 0.999);
}

TEST_CASE("gate_fidelity errors") {
  const auto p = load_profile(line_doc(4));
  CHECK_THROWS_AS(p.gate_fidelity(GateKind::cx, std::vector<int>{0, 2}), DataError);
  CHECK_THROWS_AS(p.gate_fidelity(GateKind::h, std::vector<int>{0}), DataError);
  CHECK_THROWS_AS(p.gate_fidelity(GateKind::x, std::vector<int>{4}), DataError);
}

TEST_CASE("qubit_distance examples") {
  const auto ion = bundled("ionq-forte-like");
  CHECK(ion.qubit_distance(3, 9) == 1);
  CHECK(ion.qubit_distance(4, 4) == 0);
  const auto line = load_profile(line_doc(4));
  CHECK(line.qubit_distance(0, 3) == 3);
  CHECK(line.qubit_distance(2, 2) == 0);
  CHECK(line.next_hop(0, 3) == 1);
  CHECK_THROWS_AS(line.qubit_distance(0, 4), DataError);
}

TEST_CASE("disconnected pair is an error") {
  auto doc = line_doc(4);
  doc["coupling"] = json::array({{0, 1}, {2, 3}});
  const auto p = load_profile(doc);
  CHECK_FALSE(p.connected());
  CHECK(p.qubit_distance(0, 1) == 1);
  CHECK_THROWS_AS(p.qubit_distance(0, 3), DataError);
}

TEST_CASE("random connected graphs match a Dijkstra oracle") {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(20));
    const auto edges = random_connected_edges(rng, n);
    auto doc = line_doc(n);
    doc["coupling"] = json::array();
    for (auto [a, b] : edges) doc["coupling"].push_back({a, b});
    const auto p = load_profile(doc);
    for (int a = 0; a < n; ++a) {
      const auto oracle = dijkstra(n, edges, a);
      for (int b = 0; b < n; ++b) CHECK(p.qubit_distance(a, b) == oracle[b]);
    }
  }
}

TEST_CASE("distance is symmetric and satisfies the triangle inequality on bundled profiles") {
  for (const auto* name : {"ionq-forte-like", "ibm-eagle-like"}) {
    const auto p = bundled(name);
    const int n = p.num_qubits();
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const int ab = p.qubit_distance(a, b);
        CHECK((ab == 0) == (a == b));
        CHECK(ab == p.qubit_distance(b, a));
        for (int c = 0; c < n; c += 7) CHECK(ab <= p.qubit_distance(a, c) + p.qubit_distance(c, b));
      }
    }
  }
}

TEST_CASE("load after save is the identity") {
  auto doc = line_doc(5);
  doc["fidelity_2q"] = {{"default", 0.99}, {"2-3", 0.9}};
  doc["fidelity_1q_overrides"] = {{"x:4", 0.9}};
  doc["t1_us"] = 120.5;
  for (const auto& p : {bundled("ionq-forte-like"), bundled("ibm-eagle-like"), load_profile(doc)}) {
    const auto back = load_profile(save_profile(p));
    CHECK(back.data().name == p.data().name);
    CHECK(back.data().technology == p.data().technology);
    CHECK(back.data().num_qubits == p.data().num_qubits);
    CHECK(back.data().basis_gates == p.data().basis_gates);
    CHECK(back.data().all_to_all == p.data().all_to_all);
    CHECK(back.data().coupling == p.data().coupling);
    CHECK(back.data().fidelity_1q == p.data().fidelity_1q);
    CHECK(back.data().fidelity_1q_overrides == p.data().fidelity_1q_overrides);
    CHECK(back.data().fidelity_2q == p.data().fidelity_2q);
    CHECK(back.data().fidelity_2q_overrides == p.data().fidelity_2q_overrides);
    CHECK(back.data().t1_us == p.data().t1_us);
    CHECK(back.data().t2_us == p.data().t2_us);
    CHECK(save_profile(back) == save_profile(p));
  }
}
