#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qtp/cost.hpp"
#include "qtp/dag.hpp"
#include "qtp/device.hpp"

namespace qtp {

struct ManifestEntry {
  std::string name;
  std::string circuit_path;
  std::string dag_path;  // relative to the manifest's directory
  int num_qubits = 0;
  int depth = 0;
  int num_gates = 0;
  std::map<std::string, double> costs;
  std::string best_device;
  int label = 1;
  bool tie = false;

  bool operator==(const ManifestEntry&) const = default;
};

struct SkipReport {
  std::string path;
  std::string error;

  bool operator==(const SkipReport&) const = default;
};

struct DatasetManifest {
  std::vector<std::pair<std::string, Technology>> devices;
  std::vector<ManifestEntry> entries;
  std::vector<SkipReport> skipped;

  /// (class 0, class 1) tallies over entries.
  std::array<int, 2> class_counts() const;
  bool operator==(const DatasetManifest&) const = default;
};

struct ManifestOptions {
  std::filesystem::path out_dir;  // receives manifest.json and dags/
  std::optional<std::filesystem::path> precompiled_dir;
  bool use_builtin = true;
  std::optional<std::filesystem::path> compiled_out;  // compiled-JSON artifacts
  int jobs = 1;
};

/// Precompiled files named <circuit>.<device>.qasm or
/// <circuit>.<device>.<variant>.qasm, grouped for one circuit.
VariantMap find_variants(const std::filesystem::path& dir, const std::string& circuit,
                         std::span<const DeviceProfile> profiles);

/// Labels every *.qasm file in corpus_dir (sorted by file name), writes one
/// labeled .dag.json per circuit and <out_dir>/manifest.json. Per-file errors
/// are collected in `skipped`.
DatasetManifest build_manifest(const std::filesystem::path& corpus_dir,
                               std::span<const DeviceProfile> profiles,
                               const ManifestOptions& options);

nlohmann::json manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const nlohmann::json& j);
void save_manifest(const std::filesystem::path& path, const DatasetManifest& m);
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Graphs referenced by a manifest with their labels attached.
struct Dataset {
  std::vector<CircuitDag> graphs;
  std::vector<int> labels;
  std::vector<int> qubit_counts;
  std::vector<std::string> names;

  std::size_t size() const noexcept { return graphs.size(); }
};

Dataset load_dataset(const std::filesystem::path& manifest_path);

}  // namespace qtp
