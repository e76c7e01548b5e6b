#include "qtp/circuit.hpp"

#include <algorithm>
#include <unordered_map>

#include "qtp/error.hpp"

namespace qtp {

void validate_gate(const GateInstance& g) {
  const auto& info = gate_info(g.kind);
  if (static_cast<int>(g.qubits.size()) != info.arity) {
    throw DataError("gate " + std::string(info.name) + " expects " +
                    std::to_string(info.arity) + " qubit(s), got " +
                    std::to_string(g.qubits.size()));
  }
  if (static_cast<int>(g.params.size()) != info.param_count) {
    throw DataError("gate " + std::string(info.name) + " expects " +
                    std::to_string(info.param_count) + " parameter(s), got " +
                    std::to_string(g.params.size()));
  }
  for (std::size_t i = 0; i < g.qubits.size(); ++i) {
    if (g.qubits[i] < 0) throw DataError("negative qubit index");
    for (std::size_t j = 0; j < i; ++j) {
      if (g.qubits[i] == g.qubits[j]) {
        throw DataError("duplicate qubit " + std::to_string(g.qubits[i]) +
                        " in gate " + std::string(info.name));
      }
    }
  }
}

Circuit::Circuit(int num_qubits, std::string name)
    : num_qubits_(num_qubits), name_(std::move(name)) {
  if (num_qubits <= 0) throw DataError("circuit must have at least one qubit");
}

void Circuit::add(GateInstance g) {
  validate_gate(g);
  for (int q : g.qubits) {
    if (q >= num_qubits_) {
      throw DataError("qubit index " + std::to_string(q) +
                      " out of range for " + std::to_string(num_qubits_) +
                      "-qubit circuit");
    }
  }
  ops_.push_back(std::move(g));
}

void Circuit::add(GateKind kind, std::vector<int> qubits, std::vector<double> params) {
  add(GateInstance{kind, std::move(qubits), std::move(params)});
}

int circuit_depth(std::span<const GateInstance> ops) {
  // level[q] = depth of the last gate touching q
  std::unordered_map<int, int> level;
  int depth = 0;
  for (const auto& g : ops) {
    int d = 0;
    for (int q : g.qubits) {
      auto it = level.find(q);
      if (it != level.end()) d = std::max(d, it->second);
    }
    ++d;
    for (int q : g.qubits) level[q] = d;
    depth = std::max(depth, d);
  }
  return depth;
}

}  // namespace qtp
