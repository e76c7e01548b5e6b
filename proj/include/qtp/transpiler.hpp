#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qtp/circuit.hpp"
#include "qtp/device.hpp"

namespace qtp {

struct CompiledCircuit {
  int num_qubits = 0;  // physical register size
  std::vector<GateInstance> ops;
  int depth = 0;
  std::vector<double> fidelities;
  std::vector<int> layout;  // final logical -> physical
  std::string device_name;

  bool operator==(const CompiledCircuit&) const = default;
};

/// Rewrites every gate into u3 and cx with fixed templates.
Circuit lower_to_canonical(const Circuit& c);

/// Rewrites a u3/cx circuit into the profile's basis gates. Rotations whose
/// angle is a multiple of 2pi (within 1e-12) are dropped.
Circuit rebase(const Circuit& c, const DeviceProfile& p);

struct RoutedCircuit {
  Circuit circuit;          // over the device's physical register
  std::vector<int> layout;  // final logical -> physical
};

/// Greedy SWAP insertion starting from the identity layout. SWAPs are
/// expanded into native gates.
RoutedCircuit route(const Circuit& c, const DeviceProfile& p);

/// lower -> rebase -> route, then depth and per-gate fidelities.
CompiledCircuit compile_for(const Circuit& c, const DeviceProfile& p);

/// Scores an externally compiled circuit (precompiled mode). The circuit must
/// already be in the device basis and respect the coupling map.
CompiledCircuit score_compiled(const Circuit& compiled, const DeviceProfile& p);

nlohmann::json to_json(const CompiledCircuit& cc);

}  // namespace qtp
