#include "qtp/dag.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "qtp/error.hpp"
#include "qtp/io_util.hpp"

namespace qtp {

double normalize_angle(double theta) {
  if (!std::isfinite(theta)) throw DataError("non-finite angle");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(std::fmod(theta, two_pi) + two_pi, two_pi) / two_pi;
  constexpr double grid = 4294967296.0;  // 2^32
  r = std::nearbyint(r * grid) / grid;
  return r >= 1.0 ? 0.0 : r;
}

FeatureVector encode_features(std::optional<GateKind> kind, std::span<const int> qubits,
                              std::span<const double> params) {
  if (params.size() > static_cast<std::size_t>(kAngleSlots)) {
    throw DataError("at most 3 angle parameters can be encoded");
  }
  FeatureVector f{};
  f[kind ? type_slot(*kind) : kInputSlot] = 1.0;
  for (int q : qubits) {
    if (q < 0 || q >= kQubitSlots) {
      throw DataError("qubit index " + std::to_string(q) + " exceeds the 27-qubit feature range");
    }
    f[kQubitOffset + q] = 1.0;
  }
  for (std::size_t j = 0; j < params.size(); ++j) f[kAngleOffset + j] = normalize_angle(params[j]);
  return f;
}

CircuitDag build_dag(const Circuit& c) {
  if (c.num_qubits() > kMaxFeaturizedQubits) {
    throw DataError("circuit has " + std::to_string(c.num_qubits()) +
                    " qubits; featurization supports at most 27");
  }
  CircuitDag d;
  d.num_qubits = c.num_qubits();
  d.source_name = c.name();
  d.nodes.reserve(c.num_qubits() + c.size());
  std::vector<int> last(c.num_qubits());
  for (int q = 0; q < c.num_qubits(); ++q) {
    const int qs[1] = {q};
    d.nodes.push_back({q, encode_features(std::nullopt, qs, {})});
    last[q] = q;
  }
  for (const auto& g : c.ops()) {
    const int id = static_cast<int>(d.nodes.size());
    d.nodes.push_back({id, encode_features(g.kind, g.qubits, g.params)});
    std::vector<int> preds;
    for (int q : g.qubits) {
      const int p = last[q];
      bool seen = false;
      for (int x : preds) seen = seen || x == p;
      if (!seen) {
        preds.push_back(p);
        d.edges.emplace_back(p, id);
      }
      last[q] = id;
    }
  }
  return d;
}

std::string to_graph_json(const CircuitDag& d) {
  std::ostringstream out;
  out << "{\n  \"name\": " << nlohmann::json(d.source_name).dump() << ",\n";
  out << "  \"num_qubits\": " << d.num_qubits << ",\n";
  if (d.label) out << "  \"label\": " << *d.label << ",\n";
  out << "  \"nodes\": [";
  for (std::size_t i = 0; i < d.nodes.size(); ++i) {
    out << (i ? ",\n    [" : "\n    [");
    const auto& f = d.nodes[i].feature;
    for (std::size_t j = 0; j < f.size(); ++j) {
      if (j) out << ',';
      out << format_double(f[j]);
    }
    out << ']';
  }
  out << (d.nodes.empty() ? "],\n" : "\n  ],\n");
  out << "  \"edges\": [";
  for (std::size_t i = 0; i < d.edges.size(); ++i) {
    if (i) out << ',';
    out << '[' << d.edges[i].first << ',' << d.edges[i].second << ']';
  }
  out << "]\n}\n";
  return out.str();
}

CircuitDag from_graph_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed graph JSON: ") + e.what());
  }
  try {
    CircuitDag d;
    d.source_name = j.at("name").get<std::string>();
    d.num_qubits = j.at("num_qubits").get<int>();
    if (j.contains("label")) {
      const int label = j["label"].get<int>();
      if (label != 0 && label != 1) throw DataError("label must be 0 or 1");
      d.label = label;
    }
    const auto& nodes = j.at("nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& row = nodes[i];
      if (row.size() != static_cast<std::size_t>(kFeatureSize)) {
        throw DataError("feature row " + std::to_string(i) + " does not have 66 entries");
      }
      DagNode n{static_cast<int>(i), {}};
      for (int k = 0; k < kFeatureSize; ++k) n.feature[k] = row[k].get<double>();
      d.nodes.push_back(n);
    }
    const int n = static_cast<int>(d.nodes.size());
    for (const auto& e : j.at("edges")) {
      const int s = e.at(0).get<int>();
      const int t = e.at(1).get<int>();
      if (s < 0 || t < 0 || s >= n || t >= n) throw DataError("edge references missing node");
      d.edges.emplace_back(s, t);
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("graph JSON schema violation: ") + e.what());
  }
}

void save_dag(const std::filesystem::path& path, const CircuitDag& d) {
  write_text_file(path, to_graph_json(d));
}

CircuitDag load_dag(const std::filesystem::path& path) {
  return from_graph_json(read_text_file(path));
}

}  // namespace qtp
