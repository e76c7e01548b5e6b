#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qtp/gates.hpp"

namespace qtp {

enum class Technology { TrappedIon, Superconducting };

std::string_view technology_name(Technology t);

/// Plain field bundle; DeviceProfile validates it on construction.
struct ProfileData {
  std::string name;
  Technology technology = Technology::Superconducting;
  int num_qubits = 0;
  std::vector<GateKind> basis_gates;
  bool all_to_all = false;
  std::vector<std::pair<int, int>> coupling;
  std::map<GateKind, double> fidelity_1q;
  // (gate, qubit) -> fidelity
  std::map<std::pair<GateKind, int>, double> fidelity_1q_overrides;
  std::optional<double> fidelity_2q;
  // normalized (min, max) pair -> fidelity
  std::map<std::pair<int, int>, double> fidelity_2q_overrides;
  std::optional<double> t1_us;
  std::optional<double> t2_us;
};

class DeviceProfile {
 public:
  /// Throws DataError on any invariant violation.
  explicit DeviceProfile(ProfileData data);

  const std::string& name() const noexcept { return d_.name; }
  Technology technology() const noexcept { return d_.technology; }
  int num_qubits() const noexcept { return d_.num_qubits; }
  bool all_to_all() const noexcept { return d_.all_to_all; }
  const std::vector<GateKind>& basis_gates() const noexcept { return d_.basis_gates; }
  bool in_basis(GateKind k) const;
  const ProfileData& data() const noexcept { return d_; }

  bool coupled(int a, int b) const;
  const std::vector<int>& neighbors(int q) const { return adjacency_.at(q); }
  bool connected() const noexcept { return connected_; }

  /// BFS hop count; throws DataError for out-of-range or disconnected pairs.
  int qubit_distance(int a, int b) const;

  /// Smallest-index neighbor of `from` that lies on a shortest path to `to`.
  int next_hop(int from, int to) const;

  /// Override if present, else the gate-class default. Throws DataError for
  /// non-basis gates and uncoupled two-qubit pairs.
  double gate_fidelity(GateKind kind, std::span<const int> qubits) const;

 private:
  ProfileData d_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<int> dist_;  // all-pairs BFS, -1 = unreachable; empty for all-to-all
  bool connected_ = true;
};

DeviceProfile load_profile(const nlohmann::json& doc);
DeviceProfile load_profile_file(const std::filesystem::path& path);
nlohmann::json save_profile(const DeviceProfile& p);

}  // namespace qtp
