#pragma once

#include <complex>
#include <span>
#include <vector>

#include "qtp/circuit.hpp"

namespace qtp {

using cplx = std::complex<double>;

/// Dense square complex matrix, row-major.
struct CMatrix {
  int dim = 0;
  std::vector<cplx> data;

  static CMatrix identity(int dim);
  cplx& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * dim + c]; }
  cplx operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * dim + c]; }
};

CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix adjoint(const CMatrix& a);

/// Matrix of a gate in operand order: the first listed qubit is the most
/// significant bit of the 2^arity-dimensional basis index.
CMatrix gate_matrix(const GateInstance& g);

/// Full unitary with qubit q mapped to bit q of the basis index.
/// Limited to three qubits; throws DataError beyond that.
CMatrix circuit_unitary(const Circuit& c);

/// Max element error of `a` against `b` after removing the best global phase.
double phase_distance(const CMatrix& a, const CMatrix& b);

}  // namespace qtp
