#include "qtp/device.hpp"

#include <algorithm>
#include <deque>

#include "qtp/error.hpp"
#include "qtp/io_util.hpp"

namespace qtp {
namespace {

std::pair<int, int> ordered(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

void check_fidelity(double f, const std::string& what) {
  if (!(f > 0.0 && f <= 1.0)) {
    throw DataError("fidelity " + what + " = " + std::to_string(f) + " is outside (0,1]");
  }
}

GateKind basis_gate(const std::string& name) {
  auto k = gate_from_name(name);
  if (!k || gate_name(*k) != name) throw DataError("unknown basis gate '" + name + "'");
  return *k;
}

}  // namespace

std::string_view technology_name(Technology t) {
  return t == Technology::TrappedIon ? "trapped-ion" : "superconducting";
}

DeviceProfile::DeviceProfile(ProfileData data) : d_(std::move(data)) {
  if (d_.name.empty()) throw DataError("profile name is empty");
  if (d_.num_qubits <= 0) throw DataError("profile num_qubits must be positive");
  std::sort(d_.basis_gates.begin(), d_.basis_gates.end());
  d_.basis_gates.erase(std::unique(d_.basis_gates.begin(), d_.basis_gates.end()),
                       d_.basis_gates.end());
  if (d_.basis_gates.empty()) throw DataError("profile has no basis gates");

  bool has_2q = false;
  for (GateKind g : d_.basis_gates) {
    if (gate_arity(g) > 2) throw DataError("three-qubit basis gates are not supported");
    if (gate_arity(g) == 1 && !d_.fidelity_1q.contains(g)) {
      throw DataError("missing fidelity_1q for basis gate " + std::string(gate_name(g)));
    }
    has_2q = has_2q || gate_arity(g) == 2;
  }
  for (const auto& [g, f] : d_.fidelity_1q) {
    if (gate_arity(g) != 1) throw DataError("fidelity_1q lists multi-qubit gate");
    check_fidelity(f, std::string(gate_name(g)));
  }
  for (const auto& [key, f] : d_.fidelity_1q_overrides) {
    if (key.second < 0 || key.second >= d_.num_qubits) {
      throw DataError("fidelity_1q override references qubit out of range");
    }
    check_fidelity(f, std::string(gate_name(key.first)) + ":" + std::to_string(key.second));
  }
  if (d_.fidelity_2q) check_fidelity(*d_.fidelity_2q, "2q");

  adjacency_.assign(d_.num_qubits, {});
  if (d_.all_to_all) {
    d_.coupling.clear();
  } else {
    for (auto& [a, b] : d_.coupling) {
      if (a < 0 || b < 0 || a >= d_.num_qubits || b >= d_.num_qubits) {
        throw DataError("coupling pair references qubit out of range");
      }
      if (a == b) throw DataError("coupling self-pair on qubit " + std::to_string(a));
      std::tie(a, b) = ordered(a, b);
    }
    std::sort(d_.coupling.begin(), d_.coupling.end());
    d_.coupling.erase(std::unique(d_.coupling.begin(), d_.coupling.end()), d_.coupling.end());
    for (auto [a, b] : d_.coupling) {
      adjacency_[a].push_back(b);
      adjacency_[b].push_back(a);
    }
    for (auto& nb : adjacency_) std::sort(nb.begin(), nb.end());
  }
  for (auto& [key, f] : d_.fidelity_2q_overrides) {
    check_fidelity(f, std::to_string(key.first) + "-" + std::to_string(key.second));
  }
  {
    std::map<std::pair<int, int>, double> normalized;
    for (const auto& [key, f] : d_.fidelity_2q_overrides) {
      if (!coupled(key.first, key.second)) {
        throw DataError("fidelity_2q override on uncoupled pair " + std::to_string(key.first) +
                        "-" + std::to_string(key.second));
      }
      normalized[ordered(key.first, key.second)] = f;
    }
    d_.fidelity_2q_overrides = std::move(normalized);
  }
  if (has_2q && !d_.fidelity_2q) {
    if (d_.all_to_all) throw DataError("all-to-all profile needs a default fidelity_2q");
    for (auto [a, b] : d_.coupling) {
      if (!d_.fidelity_2q_overrides.contains({a, b})) {
        throw DataError("no fidelity for coupled pair " + std::to_string(a) + "-" +
                        std::to_string(b));
      }
    }
  }
  if (d_.t1_us && !(*d_.t1_us > 0)) throw DataError("t1_us must be positive");
  if (d_.t2_us && !(*d_.t2_us > 0)) throw DataError("t2_us must be positive");

  if (!d_.all_to_all) {
    const int n = d_.num_qubits;
    dist_.assign(static_cast<std::size_t>(n) * n, -1);
    for (int s = 0; s < n; ++s) {
      int* row = &dist_[static_cast<std::size_t>(s) * n];
      std::deque<int> queue{s};
      row[s] = 0;
      while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (int v : adjacency_[u]) {
          if (row[v] < 0) {
            row[v] = row[u] + 1;
            queue.push_back(v);
          }
        }
      }
    }
    connected_ = std::none_of(dist_.begin(), dist_.end(), [](int x) { return x < 0; });
  }
}

bool DeviceProfile::in_basis(GateKind k) const {
  return std::binary_search(d_.basis_gates.begin(), d_.basis_gates.end(), k);
}

bool DeviceProfile::coupled(int a, int b) const {
  if (a == b || a < 0 || b < 0 || a >= d_.num_qubits || b >= d_.num_qubits) return false;
  if (d_.all_to_all) return true;
  return std::binary_search(d_.coupling.begin(), d_.coupling.end(), ordered(a, b));
}

int DeviceProfile::qubit_distance(int a, int b) const {
  if (a < 0 || b < 0 || a >= d_.num_qubits || b >= d_.num_qubits) {
    throw DataError("qubit index out of range for device " + d_.name);
  }
  if (a == b) return 0;
  if (d_.all_to_all) return 1;
  const int d = dist_[static_cast<std::size_t>(a) * d_.num_qubits + b];
  if (d < 0) {
    throw DataError("qubits " + std::to_string(a) + " and " + std::to_string(b) +
                    " are disconnected on " + d_.name);
  }
  return d;
}

int DeviceProfile::next_hop(int from, int to) const {
  const int d = qubit_distance(from, to);
  if (d == 0) return from;
  if (d_.all_to_all) return to;
  for (int v : adjacency_[from]) {
    if (qubit_distance(v, to) == d - 1) return v;
  }
  throw DataError("no shortest-path hop found");  // unreachable for a valid BFS table
}

double DeviceProfile::gate_fidelity(GateKind kind, std::span<const int> qubits) const {
  if (!in_basis(kind)) {
    throw DataError("gate " + std::string(gate_name(kind)) + " is not in the basis of " + d_.name);
  }
  if (static_cast<int>(qubits.size()) != gate_arity(kind)) throw DataError("qubit count mismatch");
  for (int q : qubits) {
    if (q < 0 || q >= d_.num_qubits) throw DataError("qubit out of range for " + d_.name);
  }
  if (qubits.size() == 1) {
    auto it = d_.fidelity_1q_overrides.find({kind, qubits[0]});
    return it != d_.fidelity_1q_overrides.end() ? it->second : d_.fidelity_1q.at(kind);
  }
  if (!coupled(qubits[0], qubits[1])) {
    throw DataError("qubits " + std::to_string(qubits[0]) + "," + std::to_string(qubits[1]) +
                    " are not coupled on " + d_.name);
  }
  auto it = d_.fidelity_2q_overrides.find(ordered(qubits[0], qubits[1]));
  if (it != d_.fidelity_2q_overrides.end()) return it->second;
  return *d_.fidelity_2q;
}

DeviceProfile load_profile(const nlohmann::json& doc) {
  try {
    ProfileData d;
    d.name = doc.at("name").get<std::string>();
    const auto tech = doc.at("technology").get<std::string>();
    if (tech == "trapped-ion") d.technology = Technology::TrappedIon;
    else if (tech == "superconducting") d.technology = Technology::Superconducting;
    else throw DataError("unknown technology '" + tech + "'");
    d.num_qubits = doc.at("num_qubits").get<int>();
    for (const auto& g : doc.at("basis_gates")) d.basis_gates.push_back(basis_gate(g.get<std::string>()));
    const auto& coupling = doc.at("coupling");
    if (coupling.is_string()) {
      if (coupling.get<std::string>() != "all-to-all") {
        throw DataError("coupling must be \"all-to-all\" or a pair list");
      }
      d.all_to_all = true;
    } else {
      for (const auto& pr : coupling) {
        if (pr.size() != 2) throw DataError("coupling entries must be pairs");
        d.coupling.emplace_back(pr[0].get<int>(), pr[1].get<int>());
      }
    }
    for (const auto& [gate, val] : doc.at("fidelity_1q").items()) {
      d.fidelity_1q[basis_gate(gate)] = val.get<double>();
    }
    if (doc.contains("fidelity_1q_overrides")) {
      for (const auto& [key, val] : doc["fidelity_1q_overrides"].items()) {
        const auto colon = key.find(':');
        if (colon == std::string::npos) throw DataError("fidelity_1q override key must be gate:qubit");
        d.fidelity_1q_overrides[{basis_gate(key.substr(0, colon)), std::stoi(key.substr(colon + 1))}] =
            val.get<double>();
      }
    }
    if (doc.contains("fidelity_2q")) {
      const auto& f2 = doc["fidelity_2q"];
      if (f2.is_number()) {
        d.fidelity_2q = f2.get<double>();
      } else {
        for (const auto& [key, val] : f2.items()) {
          if (key == "default") {
            d.fidelity_2q = val.get<double>();
            continue;
          }
          const auto dash = key.find('-');
          if (dash == std::string::npos) throw DataError("fidelity_2q keys must be \"a-b\"");
          d.fidelity_2q_overrides[{std::stoi(key.substr(0, dash)), std::stoi(key.substr(dash + 1))}] =
              val.get<double>();
        }
      }
    }
    if (doc.contains("t1_us")) d.t1_us = doc["t1_us"].get<double>();
    if (doc.contains("t2_us")) d.t2_us = doc["t2_us"].get<double>();
    return DeviceProfile(std::move(d));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("profile schema violation: ") + e.what());
  } catch (const std::logic_error& e) {  // stoi
    throw DataError(std::string("profile schema violation: ") + e.what());
  }
}

DeviceProfile load_profile_file(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return load_profile(doc);
}

nlohmann::json save_profile(const DeviceProfile& p) {
  const auto& d = p.data();
  nlohmann::json j;
  j["name"] = d.name;
  j["technology"] = std::string(technology_name(d.technology));
  j["num_qubits"] = d.num_qubits;
  j["basis_gates"] = nlohmann::json::array();
  for (GateKind g : d.basis_gates) j["basis_gates"].push_back(std::string(gate_name(g)));
  if (d.all_to_all) {
    j["coupling"] = "all-to-all";
  } else {
    j["coupling"] = nlohmann::json::array();
    for (auto [a, b] : d.coupling) j["coupling"].push_back({a, b});
  }
  j["fidelity_1q"] = nlohmann::json::object();
  for (const auto& [g, f] : d.fidelity_1q) j["fidelity_1q"][std::string(gate_name(g))] = f;
  if (!d.fidelity_1q_overrides.empty()) {
    for (const auto& [key, f] : d.fidelity_1q_overrides) {
      j["fidelity_1q_overrides"][std::string(gate_name(key.first)) + ":" + std::to_string(key.second)] = f;
    }
  }
  if (d.fidelity_2q_overrides.empty()) {
    if (d.fidelity_2q) j["fidelity_2q"] = *d.fidelity_2q;
  } else {
    nlohmann::json f2 = nlohmann::json::object();
    if (d.fidelity_2q) f2["default"] = *d.fidelity_2q;
    for (const auto& [key, f] : d.fidelity_2q_overrides) {
      f2[std::to_string(key.first) + "-" + std::to_string(key.second)] = f;
    }
    j["fidelity_2q"] = f2;
  }
  if (d.t1_us) j["t1_us"] = *d.t1_us;
  if (d.t2_us) j["t2_us"] = *d.t2_us;
  return j;
}

}  // namespace qtp
