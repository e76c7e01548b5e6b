#include "qtp/unitary.hpp"

#include <cmath>
#include <numbers>

#include "qtp/error.hpp"

namespace qtp {
namespace {

constexpr cplx I{0.0, 1.0};

CMatrix m2(cplx a, cplx b, cplx c, cplx d) { return CMatrix{2, {a, b, c, d}}; }

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out{a.dim * b.dim, std::vector<cplx>(static_cast<std::size_t>(a.dim * b.dim) * a.dim * b.dim)};
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j)
      for (int k = 0; k < b.dim; ++k)
        for (int l = 0; l < b.dim; ++l) out(i * b.dim + k, j * b.dim + l) = a(i, j) * b(k, l);
  return out;
}

CMatrix u3m(double th, double ph, double la) {
  const double c = std::cos(th / 2), s = std::sin(th / 2);
  return m2(c, -std::exp(I * la) * s, std::exp(I * ph) * s, std::exp(I * (ph + la)) * c);
}

CMatrix rxm(double th) { return m2(std::cos(th / 2), -I * std::sin(th / 2), -I * std::sin(th / 2), std::cos(th / 2)); }
CMatrix rym(double th) { return m2(std::cos(th / 2), -std::sin(th / 2), std::sin(th / 2), std::cos(th / 2)); }
CMatrix rzm(double th) { return m2(std::exp(-I * th / 2.0), 0, 0, std::exp(I * th / 2.0)); }
CMatrix phase(double la) { return m2(1, 0, 0, std::exp(I * la)); }

// |0><0| (x) I + |1><1| (x) U, control is the first operand.
CMatrix controlled(const CMatrix& u) {
  const int n = u.dim;
  CMatrix out = CMatrix::identity(2 * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out(n + r, n + c) = u(r, c);
  return out;
}

CMatrix pauli_exp(const CMatrix& p, double th) {
  // exp(-i th/2 P) for P with P^2 = I
  CMatrix out = CMatrix::identity(p.dim);
  for (std::size_t k = 0; k < out.data.size(); ++k) {
    out.data[k] = out.data[k] * std::cos(th / 2) - I * std::sin(th / 2) * p.data[k];
  }
  return out;
}

}  // namespace

CMatrix CMatrix::identity(int dim) {
  CMatrix m{dim, std::vector<cplx>(static_cast<std::size_t>(dim) * dim)};
  for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  CMatrix out{a.dim, std::vector<cplx>(a.data.size())};
  for (int i = 0; i < a.dim; ++i)
    for (int k = 0; k < a.dim; ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      for (int j = 0; j < a.dim; ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

CMatrix adjoint(const CMatrix& a) {
  CMatrix out{a.dim, std::vector<cplx>(a.data.size())};
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j) out(i, j) = std::conj(a(j, i));
  return out;
}

CMatrix gate_matrix(const GateInstance& g) {
  using std::numbers::pi;
  const auto& p = g.params;
  const double r2 = 1.0 / std::numbers::sqrt2;
  const CMatrix X = m2(0, 1, 1, 0);
  const CMatrix Y = m2(0, -I, I, 0);
  const CMatrix Z = m2(1, 0, 0, -1);
  const CMatrix H = m2(r2, r2, r2, -r2);
  switch (g.kind) {
    case GateKind::id: return CMatrix::identity(2);
    case GateKind::x: return X;
    case GateKind::y: return Y;
    case GateKind::z: return Z;
    case GateKind::h: return H;
    case GateKind::s: return phase(pi / 2);
    case GateKind::sdg: return phase(-pi / 2);
    case GateKind::t: return phase(pi / 4);
    case GateKind::tdg: return phase(-pi / 4);
    case GateKind::sx: return m2(cplx(0.5, 0.5), cplx(0.5, -0.5), cplx(0.5, -0.5), cplx(0.5, 0.5));
    case GateKind::sxdg: return m2(cplx(0.5, -0.5), cplx(0.5, 0.5), cplx(0.5, 0.5), cplx(0.5, -0.5));
    case GateKind::rx: return rxm(p[0]);
    case GateKind::ry: return rym(p[0]);
    case GateKind::rz: return rzm(p[0]);
    case GateKind::p:
    case GateKind::u1: return phase(p[0]);
    case GateKind::u2: return u3m(pi / 2, p[0], p[1]);
    case GateKind::u3:
    case GateKind::u: return u3m(p[0], p[1], p[2]);
    case GateKind::cx: return controlled(X);
    case GateKind::cy: return controlled(Y);
    case GateKind::cz: return controlled(Z);
    case GateKind::ch: return controlled(H);
    case GateKind::cp: return controlled(phase(p[0]));
    case GateKind::crx: return controlled(rxm(p[0]));
    case GateKind::cry: return controlled(rym(p[0]));
    case GateKind::crz: return controlled(rzm(p[0]));
    case GateKind::cu: return controlled(u3m(p[0], p[1], p[2]));
    case GateKind::swap: {
      CMatrix m{4, std::vector<cplx>(16)};
      m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
      return m;
    }
    case GateKind::ccx: return controlled(controlled(X));
    case GateKind::cswap: {
      CMatrix sw{4, std::vector<cplx>(16)};
      sw(0, 0) = sw(1, 2) = sw(2, 1) = sw(3, 3) = 1.0;
      return controlled(sw);
    }
    case GateKind::rxx: return pauli_exp(kron(X, X), p[0]);
    case GateKind::ryy: return pauli_exp(kron(Y, Y), p[0]);
    case GateKind::rzz: return pauli_exp(kron(Z, Z), p[0]);
    case GateKind::ecr: {
      // (X (x) I - Y (x) X) / sqrt(2)
      CMatrix a = kron(X, CMatrix::identity(2));
      CMatrix b = kron(Y, X);
      CMatrix m{4, std::vector<cplx>(16)};
      for (std::size_t k = 0; k < 16; ++k) m.data[k] = (a.data[k] - b.data[k]) * r2;
      return m;
    }
  }
  throw DataError("unhandled gate kind");
}

CMatrix circuit_unitary(const Circuit& c) {
  const int n = c.num_qubits();
  if (n > 3) throw DataError("circuit_unitary supports at most 3 qubits");
  const int dim = 1 << n;
  CMatrix u = CMatrix::identity(dim);
  for (const auto& g : c.ops()) {
    const CMatrix gm = gate_matrix(g);
    const int k = static_cast<int>(g.qubits.size());
    // Embed: basis index bit q <-> qubit q; operand 0 is the MSB of the local index.
    CMatrix full{dim, std::vector<cplx>(static_cast<std::size_t>(dim) * dim)};
    for (int col = 0; col < dim; ++col) {
      int local_in = 0;
      for (int i = 0; i < k; ++i) local_in = (local_in << 1) | ((col >> g.qubits[i]) & 1);
      int rest = col;
      for (int q : g.qubits) rest &= ~(1 << q);
      for (int local_out = 0; local_out < (1 << k); ++local_out) {
        const cplx amp = gm(local_out, local_in);
        if (amp == cplx{}) continue;
        int row = rest;
        for (int i = 0; i < k; ++i) {
          if ((local_out >> (k - 1 - i)) & 1) row |= 1 << g.qubits[i];
        }
        full(row, col) += amp;
      }
    }
    u = full * u;
  }
  return u;
}

double phase_distance(const CMatrix& a, const CMatrix& b) {
  if (a.dim != b.dim) throw DataError("dimension mismatch");
  // Align on the largest-magnitude entry of b.
  std::size_t best = 0;
  for (std::size_t k = 1; k < b.data.size(); ++k) {
    if (std::abs(b.data[k]) > std::abs(b.data[best])) best = k;
  }
  cplx ph = 1.0;
  if (std::abs(a.data[best]) > 1e-300) {
    ph = a.data[best] / b.data[best];
    ph /= std::abs(ph);
  }
  double err = 0.0;
  for (std::size_t k = 0; k < a.data.size(); ++k) err = std::max(err, std::abs(a.data[k] - ph * b.data[k]));
  return err;
}

}  // namespace qtp
