#include "qtp/corpus.hpp"

#include <array>
#include <cstdio>
#include <numbers>

#include "qtp/error.hpp"
#include "qtp/qasm.hpp"
#include "qtp/random.hpp"

namespace qtp {
namespace {

using std::numbers::pi;

constexpr std::array<GateKind, 6> kRotations{GateKind::rx, GateKind::ry, GateKind::rz,
                                             GateKind::p,  GateKind::u3, GateKind::u2};

void random_rotation(Circuit& c, Rng& rng, int q) {
  const GateKind k = kRotations[rng.below(kRotations.size())];
  std::vector<double> params;
  for (int i = 0; i < gate_param_count(k); ++i) params.push_back(rng.uniform(-pi, pi));
  c.add(k, {q}, std::move(params));
}

void ghz(Circuit& c, Rng& rng, int layers) {
  const int n = c.num_qubits();
  for (int l = 0; l < layers; ++l) {
    c.add(GateKind::h, {0});
    for (int q = 0; q + 1 < n; ++q) c.add(GateKind::cx, {q, q + 1});
    if (rng.below(2)) {
      for (int q = 0; q < n; ++q) c.add(GateKind::rz, {q}, {rng.uniform(-pi, pi)});
    }
  }
}

void layered(Circuit& c, Rng& rng, int layers) {
  const int n = c.num_qubits();
  for (int l = 0; l < layers; ++l) {
    for (int q = 0; q < n; ++q) c.add(GateKind::ry, {q}, {rng.uniform(-pi, pi)});
    for (int q = l % 2; q + 1 < n; q += 2) c.add(GateKind::cx, {q, q + 1});
  }
}

void rotation_heavy(Circuit& c, Rng& rng, int layers) {
  const int n = c.num_qubits();
  for (int l = 0; l < layers; ++l) {
    for (int q = 0; q < n; ++q) {
      random_rotation(c, rng, q);
      random_rotation(c, rng, q);
    }
    const int a = static_cast<int>(rng.below(n));
    int b = static_cast<int>(rng.below(n - 1));
    if (b >= a) ++b;
    c.add(GateKind::cz, {a, b});
  }
}

void fourier(Circuit& c, Rng& rng, int layers) {
  const int n = c.num_qubits();
  const int reps = 1 + layers / 4;
  for (int r = 0; r < reps; ++r) {
    for (int i = 0; i < n; ++i) {
      c.add(GateKind::h, {i});
      for (int j = i + 1; j < n; ++j) c.add(GateKind::cp, {j, i}, {pi / double(1 << std::min(j - i, 30))});
    }
    if (rng.below(2)) {
      for (int i = 0; i < n / 2; ++i) c.add(GateKind::swap, {i, n - 1 - i});
    }
  }
}

void uniform_random(Circuit& c, Rng& rng, int layers, double two_qubit_fraction) {
  const int n = c.num_qubits();
  const int count = layers * n;
  std::vector<GateKind> one, multi;
  for (const auto& info : kGateTable) {
    if (info.arity == 1) one.push_back(info.kind);
    else if (info.arity <= n) multi.push_back(info.kind);
  }
  for (int i = 0; i < count; ++i) {
    const bool use_multi = !multi.empty() && rng.uniform() < two_qubit_fraction;
    const GateKind k = use_multi ? multi[rng.below(multi.size())] : one[rng.below(one.size())];
    std::vector<int> qs;
    while (static_cast<int>(qs.size()) < gate_arity(k)) {
      const int q = static_cast<int>(rng.below(n));
      bool dup = false;
      for (int x : qs) dup = dup || x == q;
      if (!dup) qs.push_back(q);
    }
    std::vector<double> params;
    for (int j = 0; j < gate_param_count(k); ++j) params.push_back(rng.uniform(-pi, pi));
    c.add(k, std::move(qs), std::move(params));
  }
}

}  // namespace

std::vector<Circuit> gen_corpus(int n, std::uint64_t seed, const CorpusParams& params) {
  if (n < 1) throw DataError("corpus size must be at least 1");
  if (params.min_qubits < 2 || params.max_qubits > kMaxFeaturizedQubits ||
      params.min_qubits > params.max_qubits) {
    throw DataError("qubit range must lie within [2,27]");
  }
  if (params.min_depth < 1 || params.min_depth > params.max_depth) {
    throw DataError("depth range must satisfy 1 <= min <= max");
  }
  const auto& m = params.mix;
  const std::array<double, 5> weights{m.ghz, m.layered, m.rotations, m.fourier, m.random};
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw DataError("gate-mix weights must be non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw DataError("gate-mix weights sum to zero");
  if (m.two_qubit_fraction < 0.0 || m.two_qubit_fraction > 1.0) {
    throw DataError("two_qubit_fraction must lie in [0,1]");
  }
  static constexpr std::array<const char*, 5> kNames{"ghz", "layered", "rot", "qft", "rand"};

  Rng rng(seed);
  std::vector<Circuit> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    double pick = rng.uniform() * total;
    std::size_t fam = 0;
    while (fam + 1 < weights.size() && pick >= weights[fam]) pick -= weights[fam++];
    while (weights[fam] == 0.0) --fam;  // pick landed past the last non-zero weight
    const int qubits = rng.range(params.min_qubits, params.max_qubits);
    const int layers = rng.range(params.min_depth, params.max_depth);
    char name[64];
    std::snprintf(name, sizeof name, "synth_%05d_%s", i, kNames[fam]);
    Circuit c(qubits, name);
    switch (fam) {
      case 0: ghz(c, rng, layers); break;
      case 1: layered(c, rng, layers); break;
      case 2: rotation_heavy(c, rng, layers); break;
      case 3: fourier(c, rng, layers); break;
      default: uniform_random(c, rng, layers, m.two_qubit_fraction); break;
    }
    out.push_back(std::move(c));
  }
  return out;
}

void write_corpus(const std::filesystem::path& dir, const std::vector<Circuit>& circuits) {
  std::filesystem::create_directories(dir);
  for (const auto& c : circuits) write_qasm_file(dir / (c.name() + ".qasm"), c);
}

}  // namespace qtp
