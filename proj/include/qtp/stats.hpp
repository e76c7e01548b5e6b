#pragma once

#include <filesystem>
#include <string>

#include "qtp/manifest.hpp"

namespace qtp {

/// Plot-ready descriptive tables over a labeled manifest.
struct StatsTables {
  std::string qubit_histogram;  // qubits,class0,class1
  std::string normalized;       // name,qubits,depth_norm,gates_norm,label
  std::string qubits_depth;     // name,qubits,depth,label
};

/// Throws DataError for an empty manifest.
StatsTables stats(const DatasetManifest& m);

/// Writes class_by_qubits.csv, depth_gates_normalized.csv, qubits_depth.csv.
void write_stats(const std::filesystem::path& dir, const StatsTables& t);

}  // namespace qtp
