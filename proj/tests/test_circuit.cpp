#include <doctest.h>

#include <algorithm>
#include <set>

#include "qtp/corpus.hpp"
#include "qtp/error.hpp"
#include "qtp/qasm.hpp"
#include "test_util.hpp"

using namespace qtp;

namespace {

// Longest path over the "shares a qubit with an earlier op" relation,
// computed by exhaustive pairwise scan.
int depth_oracle(const Circuit& c) {
  const auto& ops = c.ops();
  std::vector<int> longest(ops.size(), 1);
  int best = 0;
  for (std::size_t j = 0; j < ops.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      bool shared = false;
      for (int a : ops[i].qubits)
        for (int b : ops[j].qubits) shared = shared || a == b;
      if (shared) longest[j] = std::max(longest[j], longest[i] + 1);
    }
    best = std::max(best, longest[j]);
  }
  return best;
}

}  // namespace

TEST_CASE("vocabulary has 35 gates and fills 36 slots with the input kind") {
  CHECK(kGateTable.size() == 35);
  CHECK(kInputSlot == 35);
  std::set<std::string_view> names;
  for (const auto& g : kGateTable) {
    names.insert(g.name);
    CHECK(gate_from_name(g.name) == g.kind);
  }
  CHECK(names.size() == 35);
  CHECK(gate_param_count(GateKind::rx) == 1);
  CHECK(gate_param_count(GateKind::u3) == 3);
  CHECK(gate_param_count(GateKind::cx) == 0);
  CHECK(gate_arity(GateKind::ccx) == 3);
  CHECK(gate_from_name("cu1") == GateKind::cp);
  CHECK(gate_from_name("cu3") == GateKind::cu);
  CHECK_FALSE(gate_from_name("foo").has_value());
}

TEST_CASE("gate instances are validated") {
  Circuit c(2);
  CHECK_THROWS_AS(c.add(GateKind::cx, {0, 0}), DataError);
  CHECK_THROWS_AS(c.add(GateKind::cx, {0}), DataError);
  CHECK_THROWS_AS(c.add(GateKind::rx, {0}), DataError);
  CHECK_THROWS_AS(c.add(GateKind::x, {2}), DataError);
  CHECK_NOTHROW(c.add(GateKind::rx, {1}, {0.5}));
}

TEST_CASE("parse single gate") {
  const auto r = parse_qasm("OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1]; x q[0];");
  CHECK(r.circuit.num_qubits() == 1);
  REQUIRE(r.circuit.size() == 1);
  CHECK(r.circuit.ops()[0] == GateInstance{GateKind::x, {0}, {}});
  CHECK(r.warnings.empty());
}

TEST_CASE("parse h, cx, rx sequence") {
  const auto r = parse_qasm("qreg q[2]; h q[0]; cx q[0],q[1]; rx(0.5) q[0];");
  REQUIRE(r.circuit.size() == 3);
  CHECK(r.circuit.ops()[0].kind == GateKind::h);
  CHECK(r.circuit.ops()[1] == GateInstance{GateKind::cx, {0, 1}, {}});
  CHECK(r.circuit.ops()[2] == GateInstance{GateKind::rx, {0}, {0.5}});
}

TEST_CASE("measure is dropped with a warning, barrier silently") {
  const auto r = parse_qasm(
      "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncreg c[2];\n"
      "h q[0];\ncx q[0],q[1];\nbarrier q;\nmeasure q[0] -> c[0];\nx q[1];\nz q[0];\n");
  CHECK(r.circuit.size() == 4);
  CHECK(r.warnings.size() == 1);
}

TEST_CASE("registers flatten in declaration order and broadcast") {
  const auto r = parse_qasm("qreg a[2]; qreg b[3]; x b[1]; h a; cx a[1], b[0];");
  CHECK(r.circuit.num_qubits() == 5);
  REQUIRE(r.circuit.size() == 4);
  CHECK(r.circuit.ops()[0].qubits == std::vector<int>{3});
  CHECK(r.circuit.ops()[1].qubits == std::vector<int>{0});
  CHECK(r.circuit.ops()[2].qubits == std::vector<int>{1});
  CHECK(r.circuit.ops()[3].qubits == std::vector<int>{1, 2});
}

TEST_CASE("parameter expressions") {
  const auto r = parse_qasm("qreg q[1]; rz(-pi/2) q[0]; u3(2*pi/4, 0.5e-1, -(1+1)) q[0]; p(sin(0)+2^3) q[0];");
  REQUIRE(r.circuit.size() == 3);
  CHECK(r.circuit.ops()[0].params[0] == doctest::Approx(-std::numbers::pi / 2).epsilon(1e-15));
  CHECK(r.circuit.ops()[1].params == std::vector<double>{std::numbers::pi / 2, 0.05, -2.0});
  CHECK(r.circuit.ops()[2].params[0] == 8.0);
}

TEST_CASE("parse errors carry a location") {
  try {
    parse_qasm("qreg q[2];\nh q[0]\ncx q[0],q[1];");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() >= 1);
  }
  CHECK_THROWS_AS(parse_qasm("qreg q[2]; foo q[0];"), ParseError);
  CHECK_THROWS_AS(parse_qasm("qreg q[2]; x q[2];"), ParseError);
  CHECK_THROWS_AS(parse_qasm("qreg q[2]; cx q[1],q[1];"), ParseError);
  CHECK_THROWS_AS(parse_qasm("qreg q[1]; rx q[0];"), ParseError);
  CHECK_THROWS_AS(parse_qasm("qreg q[1]; gate g a { x a; }"), ParseError);
}

TEST_CASE("serialize emits one statement per gate") {
  Circuit c(1, "one");
  c.add(GateKind::x, {0});
  const std::string text = serialize_qasm(c);
  CHECK(std::count(text.begin(), text.end(), '\n') >= 1);
  CHECK(text.find("x q[0];") != std::string::npos);
  const auto lines = std::count(text.begin(), text.end(), ';');
  CHECK(lines == 4);  // OPENQASM, include, qreg, x
}

TEST_CASE("empty circuit round-trips") {
  Circuit c(3, "empty");
  const auto r = parse_qasm(serialize_qasm(c));
  CHECK(r.circuit.empty());
  CHECK(r.circuit.structurally_equal(c));
}

TEST_CASE("serialize then parse is the identity on generated and random circuits") {
  for (const auto& c : gen_corpus(60, 11)) {
    CHECK(parse_qasm(serialize_qasm(c)).circuit.structurally_equal(c));
  }
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const Circuit c = test::random_circuit(rng, 1 + static_cast<int>(rng.below(5)), 30);
    CHECK(parse_qasm(serialize_qasm(c)).circuit.structurally_equal(c));
  }
}

TEST_CASE("depth examples") {
  CHECK(circuit_depth(Circuit(2)) == 0);
  Circuit a(2);
  a.add(GateKind::h, {0});
  a.add(GateKind::x, {1});
  CHECK(circuit_depth(a) == 1);
  Circuit b(2);
  b.add(GateKind::h, {0});
  b.add(GateKind::cx, {0, 1});
  b.add(GateKind::x, {1});
  CHECK(circuit_depth(b) == 3);
  Circuit chain(1);
  for (int i = 0; i < 17; ++i) chain.add(GateKind::t, {0});
  CHECK(circuit_depth(chain) == 17);
}

TEST_CASE("depth matches the pairwise longest-path oracle") {
  Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    const Circuit c = test::random_circuit(rng, 1 + static_cast<int>(rng.below(6)), static_cast<int>(rng.below(40)));
    CHECK(circuit_depth(c) == depth_oracle(c));
  }
}

TEST_CASE("depth is invariant under swapping adjacent disjoint ops") {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const Circuit c = test::random_circuit(rng, 5, 25);
    std::vector<GateInstance> ops = c.ops();
    for (std::size_t k = 0; k + 1 < ops.size(); ++k) {
      bool disjoint = true;
      for (int a : ops[k].qubits)
        for (int b : ops[k + 1].qubits) disjoint = disjoint && a != b;
      if (disjoint) std::swap(ops[k], ops[k + 1]);
    }
    CHECK(circuit_depth(ops) == circuit_depth(c));
  }
}
