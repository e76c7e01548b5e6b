#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qtp/circuit.hpp"

namespace qtp {

// Node feature layout: [0,36) gate-type one-hot (slot 35 = INPUT),
// [36,63) qubit multi-hot, [63,66) normalized angles in [0,1).
inline constexpr int kTypeSlots = 36;
inline constexpr int kQubitSlots = 27;
inline constexpr int kAngleSlots = 3;
inline constexpr int kQubitOffset = kTypeSlots;
inline constexpr int kAngleOffset = kTypeSlots + kQubitSlots;
inline constexpr int kFeatureSize = kTypeSlots + kQubitSlots + kAngleSlots;
static_assert(kFeatureSize == 66);

using FeatureVector = std::array<double, kFeatureSize>;

struct DagNode {
  int node_id;
  FeatureVector feature;

  bool operator==(const DagNode&) const = default;
};

struct CircuitDag {
  std::vector<DagNode> nodes;
  std::vector<std::pair<int, int>> edges;
  int num_qubits = 0;
  std::optional<int> label;
  std::string source_name;

  bool operator==(const CircuitDag&) const = default;
};

/// Maps an angle to [0,1) as (theta mod 2pi)/2pi. The result is rounded to a
/// 2^-32 grid so that theta and theta + 2pi encode identically.
double normalize_angle(double theta);

/// Feature vector for one node. `kind` == nullopt encodes an INPUT node.
FeatureVector encode_features(std::optional<GateKind> kind, std::span<const int> qubits,
                              std::span<const double> params);

/// One INPUT node per qubit (ids 0..n-1), then one node per op in program
/// order. Each op gets one edge from every distinct previous node on its wires.
CircuitDag build_dag(const Circuit& c);

/// graph-JSON text: {"name","num_qubits","label"?,"nodes","edges"}.
std::string to_graph_json(const CircuitDag& d);
CircuitDag from_graph_json(std::string_view text);

void save_dag(const std::filesystem::path& path, const CircuitDag& d);
CircuitDag load_dag(const std::filesystem::path& path);

}  // namespace qtp
