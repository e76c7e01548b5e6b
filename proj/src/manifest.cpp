#include "qtp/manifest.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "qtp/error.hpp"
#include "qtp/io_util.hpp"
#include "qtp/log.hpp"
#include "qtp/qasm.hpp"

namespace qtp {
namespace fs = std::filesystem;

std::array<int, 2> DatasetManifest::class_counts() const {
  std::array<int, 2> c{0, 0};
  for (const auto& e : entries) ++c[e.label];
  return c;
}

VariantMap find_variants(const fs::path& dir, const std::string& circuit,
                         std::span<const DeviceProfile> profiles) {
  VariantMap out;
  if (!fs::is_directory(dir)) return out;
  std::vector<fs::path> files;
  for (const auto& de : fs::directory_iterator(dir)) {
    if (de.is_regular_file() && de.path().extension() == ".qasm") files.push_back(de.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& p : profiles) {
    const std::string prefix = circuit + "." + p.name();
    for (const auto& f : files) {
      const std::string stem = f.stem().string();
      if (stem == prefix || stem.starts_with(prefix + ".")) {
        out[p.name()].push_back(read_qasm_file(f).circuit);
      }
    }
  }
  return out;
}

namespace {

struct Outcome {
  std::optional<ManifestEntry> entry;
  std::optional<SkipReport> skip;
};

Outcome process(const fs::path& file, std::span<const DeviceProfile> profiles,
                const ManifestOptions& opts) {
  Outcome o;
  try {
    auto parsed = read_qasm_file(file);
    for (const auto& w : parsed.warnings) log_info(file.filename().string() + ": " + w);
    const Circuit& c = parsed.circuit;
    CircuitDag dag = build_dag(c);
    VariantMap variants;
    if (opts.precompiled_dir) variants = find_variants(*opts.precompiled_dir, c.name(), profiles);
    LabelOptions lo;
    lo.use_builtin = opts.use_builtin;
    lo.keep_compiled = opts.compiled_out.has_value();
    const LabelResult r = label_circuit(c, profiles, variants, lo);
    dag.label = r.label;
    const std::string dag_rel = "dags/" + c.name() + ".dag.json";
    save_dag(opts.out_dir / dag_rel, dag);
    if (opts.compiled_out) {
      for (const auto& [dev, cc] : r.compiled) {
        write_text_file(*opts.compiled_out / (c.name() + "." + dev + ".compiled.json"),
                        to_json(cc).dump(1) + "\n");
      }
    }
    ManifestEntry e;
    e.name = c.name();
    e.circuit_path = file.string();
    e.dag_path = dag_rel;
    e.num_qubits = c.num_qubits();
    e.depth = circuit_depth(c);
    e.num_gates = static_cast<int>(c.size());
    e.costs = r.costs;
    e.best_device = r.best_device;
    e.label = r.label;
    e.tie = r.tie;
    o.entry = std::move(e);
  } catch (const DataError& err) {
    o.skip = SkipReport{file.string(), err.what()};
    log_warn("skipping " + file.string() + ": " + err.what());
  }
  return o;
}

}  // namespace

DatasetManifest build_manifest(const fs::path& corpus_dir, std::span<const DeviceProfile> profiles,
                               const ManifestOptions& options) {
  if (!fs::is_directory(corpus_dir)) throw DataError("not a directory: " + corpus_dir.string());
  std::vector<fs::path> files;
  for (const auto& de : fs::directory_iterator(corpus_dir)) {
    if (de.is_regular_file() && de.path().extension() == ".qasm") files.push_back(de.path());
  }
  std::sort(files.begin(), files.end());

  DatasetManifest m;
  for (const auto& p : profiles) m.devices.emplace_back(p.name(), p.technology());
  std::sort(m.devices.begin(), m.devices.end());

  std::vector<Outcome> outcomes(files.size());
  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(files.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) outcomes[i] = process(files[i], profiles, options);
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  for (auto& o : outcomes) {
    if (o.entry) m.entries.push_back(std::move(*o.entry));
    if (o.skip) m.skipped.push_back(std::move(*o.skip));
  }
  save_manifest(options.out_dir / "manifest.json", m);
  return m;
}

nlohmann::json manifest_to_json(const DatasetManifest& m) {
  nlohmann::json j;
  j["devices"] = nlohmann::json::array();
  for (const auto& [name, tech] : m.devices) {
    j["devices"].push_back({{"name", name}, {"technology", std::string(technology_name(tech))}});
  }
  const auto counts = m.class_counts();
  j["class_counts"] = {counts[0], counts[1]};
  j["entries"] = nlohmann::json::array();
  for (const auto& e : m.entries) {
    j["entries"].push_back({{"name", e.name},
                            {"circuit_path", e.circuit_path},
                            {"dag_path", e.dag_path},
                            {"num_qubits", e.num_qubits},
                            {"depth", e.depth},
                            {"num_gates", e.num_gates},
                            {"costs", e.costs},
                            {"best_device", e.best_device},
                            {"label", e.label},
                            {"tie", e.tie}});
  }
  j["skipped"] = nlohmann::json::array();
  for (const auto& s : m.skipped) j["skipped"].push_back({{"path", s.path}, {"error", s.error}});
  return j;
}

DatasetManifest manifest_from_json(const nlohmann::json& j) {
  try {
    DatasetManifest m;
    for (const auto& d : j.at("devices")) {
      const auto tech = d.at("technology").get<std::string>();
      m.devices.emplace_back(d.at("name").get<std::string>(),
                             tech == "trapped-ion" ? Technology::TrappedIon : Technology::Superconducting);
    }
    for (const auto& je : j.at("entries")) {
      ManifestEntry e;
      e.name = je.at("name").get<std::string>();
      e.circuit_path = je.at("circuit_path").get<std::string>();
      e.dag_path = je.at("dag_path").get<std::string>();
      e.num_qubits = je.at("num_qubits").get<int>();
      e.depth = je.at("depth").get<int>();
      e.num_gates = je.at("num_gates").get<int>();
      e.costs = je.at("costs").get<std::map<std::string, double>>();
      e.best_device = je.at("best_device").get<std::string>();
      e.label = je.at("label").get<int>();
      e.tie = je.value("tie", false);
      if (e.label != 0 && e.label != 1) throw DataError("manifest label must be 0 or 1");
      m.entries.push_back(std::move(e));
    }
    if (j.contains("skipped")) {
      for (const auto& s : j["skipped"]) {
        m.skipped.push_back({s.at("path").get<std::string>(), s.at("error").get<std::string>()});
      }
    }
    if (j.contains("class_counts")) {
      const auto stored = j["class_counts"].get<std::array<int, 2>>();
      if (stored != m.class_counts()) throw DataError("manifest class_counts disagree with entries");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("manifest schema violation: ") + e.what());
  }
}

void save_manifest(const fs::path& path, const DatasetManifest& m) {
  write_text_file(path, manifest_to_json(m).dump(2) + "\n");
}

DatasetManifest load_manifest(const fs::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return manifest_from_json(j);
}

Dataset load_dataset(const fs::path& manifest_path) {
  const auto m = load_manifest(manifest_path);
  const fs::path base = manifest_path.parent_path();
  Dataset ds;
  for (const auto& e : m.entries) {
    CircuitDag d = load_dag(base / e.dag_path);
    d.label = e.label;
    ds.graphs.push_back(std::move(d));
    ds.labels.push_back(e.label);
    ds.qubit_counts.push_back(e.num_qubits);
    ds.names.push_back(e.name);
  }
  return ds;
}

}  // namespace qtp
