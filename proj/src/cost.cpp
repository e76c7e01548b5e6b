#include "qtp/cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qtp/error.hpp"
#include "qtp/log.hpp"

namespace qtp {

double cost(int depth, std::span<const double> fidelities) {
  if (fidelities.empty()) throw DataError("cost is undefined for an empty compiled circuit");
  if (depth < 0) throw DataError("negative depth");
  double lo = fidelities[0], hi = fidelities[0];
  double log_sum = 0.0;
  for (double f : fidelities) {
    if (!(f > 0.0 && f <= 1.0)) throw DataError("gate fidelity outside (0,1]");
    lo = std::min(lo, f);
    hi = std::max(hi, f);
    log_sum += std::log(f);
  }
  const double k = (hi + lo) / 2.0;
  return -static_cast<double>(depth) * std::log(k) - log_sum;
}

LabelResult pick_best(const std::map<std::string, double>& costs,
                      std::span<const DeviceProfile> profiles, double scale) {
  if (!(scale > 0.0)) throw DataError("cost scale must be positive");
  if (costs.empty()) throw DataError("no device costs to compare");
  LabelResult r;
  r.costs = costs;
  double best = std::numeric_limits<double>::infinity();
  // std::map iterates names in lexicographic order, so strict < keeps the
  // smallest name among equal costs.
  for (const auto& [name, c] : costs) {
    const double scaled = c * scale;
    if (scaled < best) {
      best = scaled;
      r.best_device = name;
      r.tie = false;
    } else if (scaled == best) {
      r.tie = true;
    }
  }
  const auto it = std::find_if(profiles.begin(), profiles.end(),
                               [&](const DeviceProfile& p) { return p.name() == r.best_device; });
  if (it == profiles.end()) throw DataError("no profile named " + r.best_device);
  r.label = label_for(it->technology());
  return r;
}

LabelResult label_circuit(const Circuit& c, std::span<const DeviceProfile> profiles,
                          const VariantMap& variants, const LabelOptions& opts) {
  bool has_ion = false, has_sc = false;
  for (const auto& p : profiles) {
    has_ion = has_ion || p.technology() == Technology::TrappedIon;
    has_sc = has_sc || p.technology() == Technology::Superconducting;
  }
  if (!has_ion || !has_sc) {
    throw DataError("labeling needs at least one trapped-ion and one superconducting profile");
  }
  std::map<std::string, double> costs;
  std::map<std::string, CompiledCircuit> compiled;
  for (const auto& p : profiles) {
    if (c.num_qubits() > p.num_qubits()) {
      throw DataError(c.name() + " needs " + std::to_string(c.num_qubits()) + " qubits; " +
                      p.name() + " has " + std::to_string(p.num_qubits()));
    }
    double best = std::numeric_limits<double>::infinity();
    CompiledCircuit best_cc;
    auto consider = [&](CompiledCircuit cc) {
      const double v = cost(cc);
      if (v < best) {
        best = v;
        if (opts.keep_compiled) best_cc = std::move(cc);
      }
    };
    if (opts.use_builtin) consider(compile_for(c, p));
    if (auto it = variants.find(p.name()); it != variants.end()) {
      for (const auto& v : it->second) consider(score_compiled(v, p));
    }
    if (!std::isfinite(best)) throw DataError("no compiled variant for device " + p.name());
    costs[p.name()] = best;
    if (opts.keep_compiled) compiled[p.name()] = std::move(best_cc);
  }
  auto r = pick_best(costs, profiles);
  r.compiled = std::move(compiled);
  if (r.tie) log_info("tie on " + c.name() + ": chose " + r.best_device + " lexicographically");
  return r;
}

}  // namespace qtp
