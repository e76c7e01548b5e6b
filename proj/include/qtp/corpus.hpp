#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "qtp/circuit.hpp"

namespace qtp {

/// Relative weights of the structured families and the uniform-random family.
struct GateMix {
  double ghz = 1.0;         // h + CX chain, optionally repeated
  double layered = 1.0;     // rotation layers + nearest-neighbour CX bricks
  double rotations = 1.0;   // rotation-heavy, sparse entanglers
  double fourier = 1.0;     // all-pairs controlled-phase ladders
  double random = 1.0;      // uniform over the vocabulary
  double two_qubit_fraction = 0.35;  // for the random family
};

struct CorpusParams {
  int min_qubits = 2;
  int max_qubits = 27;
  int min_depth = 1;  // layer count range used by every family
  int max_depth = 8;
  GateMix mix;
};

/// Deterministic for a given seed. Throws DataError on invalid ranges.
std::vector<Circuit> gen_corpus(int n, std::uint64_t seed, const CorpusParams& params = {});

/// Writes <dir>/<name>.qasm for each circuit.
void write_corpus(const std::filesystem::path& dir, const std::vector<Circuit>& circuits);

}  // namespace qtp
