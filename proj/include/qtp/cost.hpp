#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "qtp/circuit.hpp"
#include "qtp/device.hpp"
#include "qtp/transpiler.hpp"

namespace qtp {

/// -D ln K - sum ln F_i with K = (max F_i + min F_i) / 2 over this circuit's
/// gates. Throws DataError for an empty gate list or F_i outside (0,1].
double cost(int depth, std::span<const double> fidelities);
inline double cost(const CompiledCircuit& cc) { return cost(cc.depth, cc.fidelities); }

/// Class convention: 0 = trapped-ion, 1 = superconducting.
inline int label_for(Technology t) { return t == Technology::TrappedIon ? 0 : 1; }

struct LabelResult {
  std::map<std::string, double> costs;  // device name -> best cost
  std::string best_device;
  int label = 1;
  bool tie = false;
  // Lowest-cost compiled form per device; filled when LabelOptions::keep_compiled.
  std::map<std::string, CompiledCircuit> compiled;
};

/// Argmin over devices; equal costs resolve to the lexicographically smallest
/// device name. Every cost is multiplied by `scale` (> 0) before comparison.
LabelResult pick_best(const std::map<std::string, double>& costs,
                      std::span<const DeviceProfile> profiles, double scale = 1.0);

/// Precompiled variants for one circuit, keyed by device name.
using VariantMap = std::map<std::string, std::vector<Circuit>>;

struct LabelOptions {
  bool use_builtin = true;  // run compile_for in addition to any variants
  bool keep_compiled = false;
};

/// Scores the circuit on every profile (min over built-in and precompiled
/// variants) and picks the best device. Needs at least one trapped-ion and
/// one superconducting profile.
LabelResult label_circuit(const Circuit& c, std::span<const DeviceProfile> profiles,
                          const VariantMap& variants = {}, const LabelOptions& opts = {});

}  // namespace qtp
