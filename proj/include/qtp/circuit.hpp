#pragma once

#include <span>
#include <string>
#include <vector>

#include "qtp/gates.hpp"

namespace qtp {

/// Qubit count accepted by the DAG featurizer.
inline constexpr int kMaxFeaturizedQubits = 27;

struct GateInstance {
  GateKind kind;
  std::vector<int> qubits;
  std::vector<double> params;

  bool operator==(const GateInstance&) const = default;
};

/// Throws DataError unless qubits/params agree with the gate's arity and
/// parameter count and the qubits are distinct and non-negative.
void validate_gate(const GateInstance& g);

/// An ordered gate list over a flat 0-based qubit index space.
class Circuit {
 public:
  explicit Circuit(int num_qubits, std::string name = "circuit");

  /// Appends a gate after validating it against this circuit's register.
  void add(GateInstance g);
  void add(GateKind kind, std::vector<int> qubits, std::vector<double> params = {});

  int num_qubits() const noexcept { return num_qubits_; }
  const std::vector<GateInstance>& ops() const noexcept { return ops_; }
  std::size_t size() const noexcept { return ops_.size(); }
  bool empty() const noexcept { return ops_.empty(); }
  const std::string& name() const noexcept { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  /// Same register size and gate list; the name is not compared.
  bool structurally_equal(const Circuit& other) const {
    return num_qubits_ == other.num_qubits_ && ops_ == other.ops_;
  }

 private:
  int num_qubits_;
  std::string name_;
  std::vector<GateInstance> ops_;
};

/// Length of the longest chain of gates linked by shared qubits.
int circuit_depth(std::span<const GateInstance> ops);
inline int circuit_depth(const Circuit& c) { return circuit_depth(c.ops()); }

}  // namespace qtp
