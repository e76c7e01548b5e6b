#include "qtp/transpiler.hpp"

#include <cmath>
#include <numbers>

#include "qtp/error.hpp"

namespace qtp {
namespace {

using std::numbers::pi;
constexpr double kAngleTol = 1e-12;

// Wraps into (-pi, pi].
double wrap(double a) {
  double r = std::remainder(a, 2.0 * pi);
  if (r <= -pi) r += 2.0 * pi;
  return r;
}

bool is_zero_angle(double a) { return std::abs(wrap(a)) < kAngleTol; }
bool same_angle(double a, double b) { return is_zero_angle(a - b); }

// Single-qubit gate as e^{i gamma} u3(theta, phi, lambda).
struct U3Form {
  double gamma, theta, phi, lambda;
};

U3Form u3_form(const GateInstance& g) {
  const auto& p = g.params;
  switch (g.kind) {
    case GateKind::id: return {0, 0, 0, 0};
    case GateKind::x: return {0, pi, 0, pi};
    case GateKind::y: return {0, pi, pi / 2, pi / 2};
    case GateKind::z: return {0, 0, 0, pi};
    case GateKind::h: return {0, pi / 2, 0, pi};
    case GateKind::s: return {0, 0, 0, pi / 2};
    case GateKind::sdg: return {0, 0, 0, -pi / 2};
    case GateKind::t: return {0, 0, 0, pi / 4};
    case GateKind::tdg: return {0, 0, 0, -pi / 4};
    case GateKind::sx: return {pi / 4, pi / 2, -pi / 2, pi / 2};
    case GateKind::sxdg: return {-pi / 4, -pi / 2, -pi / 2, pi / 2};
    case GateKind::rx: return {0, p[0], -pi / 2, pi / 2};
    case GateKind::ry: return {0, p[0], 0, 0};
    case GateKind::rz: return {-p[0] / 2, 0, 0, p[0]};
    case GateKind::p:
    case GateKind::u1: return {0, 0, 0, p[0]};
    case GateKind::u2: return {0, pi / 2, p[0], p[1]};
    case GateKind::u3:
    case GateKind::u: return {0, p[0], p[1], p[2]};
    default: throw DataError("not a single-qubit gate: " + std::string(gate_name(g.kind)));
  }
}

// Target gate of a controlled single-qubit gate.
GateInstance controlled_target(const GateInstance& g) {
  switch (g.kind) {
    case GateKind::cy: return {GateKind::y, {g.qubits[1]}, {}};
    case GateKind::cz: return {GateKind::z, {g.qubits[1]}, {}};
    case GateKind::ch: return {GateKind::h, {g.qubits[1]}, {}};
    case GateKind::cp: return {GateKind::p, {g.qubits[1]}, g.params};
    case GateKind::crx: return {GateKind::rx, {g.qubits[1]}, g.params};
    case GateKind::cry: return {GateKind::ry, {g.qubits[1]}, g.params};
    case GateKind::crz: return {GateKind::rz, {g.qubits[1]}, g.params};
    case GateKind::cu: return {GateKind::u3, {g.qubits[1]}, g.params};
    default: throw DataError("not a controlled single-qubit gate");
  }
}

class CanonicalBuilder {
 public:
  explicit CanonicalBuilder(Circuit& out) : out_(out) {}

  void u3(int q, double th, double ph, double la) { out_.add(GateKind::u3, {q}, {th, ph, la}); }
  void u1(int q, double la) { u3(q, 0, 0, la); }
  void cx(int c, int t) { out_.add(GateKind::cx, {c, t}); }
  void h(int q) { u3(q, pi / 2, 0, pi); }
  void t(int q) { u1(q, pi / 4); }
  void tdg(int q) { u1(q, -pi / 4); }

  // Controlled e^{i gamma} u3(theta, phi, lambda).
  void controlled_u3(int c, int tq, const U3Form& f) {
    u1(c, f.gamma + (f.lambda + f.phi) / 2);
    u1(tq, (f.lambda - f.phi) / 2);
    cx(c, tq);
    u3(tq, -f.theta / 2, 0, -(f.phi + f.lambda) / 2);
    cx(c, tq);
    u3(tq, f.theta / 2, f.phi, 0);
  }

  void rzz(int a, int b, double th) {
    cx(a, b);
    u1(b, th);
    cx(a, b);
  }

  void ccx(int a, int b, int c) {
    h(c);
    cx(b, c);
    tdg(c);
    cx(a, c);
    t(c);
    cx(b, c);
    tdg(c);
    cx(a, c);
    t(b);
    t(c);
    h(c);
    cx(a, b);
    t(a);
    tdg(b);
    cx(a, b);
  }

  void lower(const GateInstance& g) {
    const auto& q = g.qubits;
    switch (g.kind) {
      case GateKind::cx: cx(q[0], q[1]); return;
      case GateKind::cy:
      case GateKind::cz:
      case GateKind::ch:
      case GateKind::cp:
      case GateKind::crx:
      case GateKind::cry:
      case GateKind::crz:
      case GateKind::cu: controlled_u3(q[0], q[1], u3_form(controlled_target(g))); return;
      case GateKind::swap:
        cx(q[0], q[1]);
        cx(q[1], q[0]);
        cx(q[0], q[1]);
        return;
      case GateKind::ccx: ccx(q[0], q[1], q[2]); return;
      case GateKind::cswap:
        cx(q[2], q[1]);
        ccx(q[0], q[1], q[2]);
        cx(q[2], q[1]);
        return;
      case GateKind::rzz: rzz(q[0], q[1], g.params[0]); return;
      case GateKind::rxx:
        h(q[0]);
        h(q[1]);
        rzz(q[0], q[1], g.params[0]);
        h(q[0]);
        h(q[1]);
        return;
      case GateKind::ryy:
        u3(q[0], pi / 2, -pi / 2, pi / 2);
        u3(q[1], pi / 2, -pi / 2, pi / 2);
        rzz(q[0], q[1], g.params[0]);
        u3(q[0], -pi / 2, -pi / 2, pi / 2);
        u3(q[1], -pi / 2, -pi / 2, pi / 2);
        return;
      case GateKind::ecr:
        // ecr = (u3(pi,pi/2,0) (x) rx(-pi/2)) . cx, up to phase; invert the dressing.
        cx(q[0], q[1]);
        u3(q[0], pi, -pi / 2, pi);
        u3(q[1], pi / 2, -pi / 2, pi / 2);
        return;
      default: {
        const auto f = u3_form(g);
        u3(q[0], f.theta, f.phi, f.lambda);
      }
    }
  }

 private:
  Circuit& out_;
};

enum class OneQubitStyle { U3, ZSX, ZYZ };
enum class TwoQubitNative { CX, ECR, RXX };

struct BasisPlan {
  OneQubitStyle style;
  TwoQubitNative native;
};

BasisPlan plan_for(const DeviceProfile& p) {
  BasisPlan plan{};
  if (p.in_basis(GateKind::u3)) plan.style = OneQubitStyle::U3;
  else if (p.in_basis(GateKind::rz) && p.in_basis(GateKind::sx)) plan.style = OneQubitStyle::ZSX;
  else if (p.in_basis(GateKind::rz) && p.in_basis(GateKind::ry)) plan.style = OneQubitStyle::ZYZ;
  else throw DataError("basis of " + p.name() + " lacks universal single-qubit coverage");
  if (p.in_basis(GateKind::cx)) plan.native = TwoQubitNative::CX;
  else if (p.in_basis(GateKind::ecr)) plan.native = TwoQubitNative::ECR;
  else if (p.in_basis(GateKind::rxx)) plan.native = TwoQubitNative::RXX;
  else throw DataError("basis of " + p.name() + " has no supported two-qubit native");
  return plan;
}

class Rebaser {
 public:
  Rebaser(const DeviceProfile& p, Circuit& out) : p_(p), plan_(plan_for(p)), out_(out) {}

  void apply(const GateInstance& g) {
    if (g.kind == GateKind::u3) u3(g.qubits[0], g.params[0], g.params[1], g.params[2]);
    else if (g.kind == GateKind::cx) cx(g.qubits[0], g.qubits[1]);
    else throw DataError("rebase expects a u3/cx circuit, found " + std::string(gate_name(g.kind)));
  }

  void cx(int c, int t) {
    switch (plan_.native) {
      case TwoQubitNative::CX: out_.add(GateKind::cx, {c, t}); break;
      case TwoQubitNative::ECR:
        out_.add(GateKind::ecr, {c, t});
        u3(c, pi, pi / 2, 0);
        u3(t, -pi / 2, -pi / 2, pi / 2);
        break;
      case TwoQubitNative::RXX:
        u3(c, pi / 2, 0, 0);
        out_.add(GateKind::rxx, {c, t}, {pi / 2});
        u3(c, -pi / 2, -pi / 2, pi / 2);
        u3(t, -pi / 2, -pi / 2, pi / 2);
        u3(c, -pi / 2, 0, 0);
        break;
    }
  }

  void u3(int q, double th, double ph, double la) {
    if (plan_.style == OneQubitStyle::U3) {
      if (is_zero_angle(th) && is_zero_angle(ph + la)) return;
      out_.add(GateKind::u3, {q}, {wrap(th), wrap(ph), wrap(la)});
      return;
    }
    if (is_zero_angle(th)) {
      rot(GateKind::rz, q, ph + la);
      return;
    }
    if (plan_.style == OneQubitStyle::ZSX) {
      // theta in (-pi, 0) is folded to the positive branch.
      double t = wrap(th);
      if (t < 0) {
        t = -t;
        ph += pi;
        la += pi;
      }
      if (same_angle(t, pi) && p_.in_basis(GateKind::x)) {
        rot(GateKind::rz, q, la + pi);
        out_.add(GateKind::x, {q});
        rot(GateKind::rz, q, ph);
      } else if (same_angle(t, pi / 2)) {
        rot(GateKind::rz, q, la - pi / 2);
        out_.add(GateKind::sx, {q});
        rot(GateKind::rz, q, ph + pi / 2);
      } else {
        rot(GateKind::rz, q, la);
        out_.add(GateKind::sx, {q});
        rot(GateKind::rz, q, t + pi);
        out_.add(GateKind::sx, {q});
        rot(GateKind::rz, q, ph + pi);
      }
      return;
    }
    // ZYZ, with an rx shortcut for u3(theta, -pi/2, pi/2).
    if (p_.in_basis(GateKind::rx) && same_angle(ph, -pi / 2) && same_angle(la, pi / 2)) {
      rot(GateKind::rx, q, th);
      return;
    }
    rot(GateKind::rz, q, la);
    rot(GateKind::ry, q, th);
    rot(GateKind::rz, q, ph);
  }

 private:
  void rot(GateKind k, int q, double a) {
    if (is_zero_angle(a)) return;
    out_.add(k, {q}, {wrap(a)});
  }

  const DeviceProfile& p_;
  BasisPlan plan_;
  Circuit& out_;
};

}  // namespace

Circuit lower_to_canonical(const Circuit& c) {
  Circuit out(c.num_qubits(), c.name());
  CanonicalBuilder b(out);
  for (const auto& g : c.ops()) b.lower(g);
  return out;
}

Circuit rebase(const Circuit& c, const DeviceProfile& p) {
  Circuit out(c.num_qubits(), c.name());
  Rebaser r(p, out);
  for (const auto& g : c.ops()) r.apply(g);
  return out;
}

RoutedCircuit route(const Circuit& c, const DeviceProfile& p) {
  const int n = p.num_qubits();
  if (c.num_qubits() > n) {
    throw DataError("circuit needs " + std::to_string(c.num_qubits()) + " qubits; " + p.name() +
                    " has " + std::to_string(n));
  }
  if (!p.connected()) throw DataError("coupling graph of " + p.name() + " is disconnected");
  std::vector<int> log2phys(n), phys2log(n);
  for (int i = 0; i < n; ++i) log2phys[i] = phys2log[i] = i;

  Circuit out(n, c.name());
  Rebaser native(p, out);
  for (const auto& g : c.ops()) {
    if (g.qubits.size() == 2) {
      const int a = g.qubits[0];
      const int b = g.qubits[1];
      while (p.qubit_distance(log2phys[a], log2phys[b]) > 1) {
        const int from = log2phys[a];
        const int hop = p.next_hop(from, log2phys[b]);
        // swap(from, hop) = 3 cx, each rewritten to the native gate
        native.cx(from, hop);
        native.cx(hop, from);
        native.cx(from, hop);
        std::swap(phys2log[from], phys2log[hop]);
        log2phys[phys2log[from]] = from;
        log2phys[phys2log[hop]] = hop;
      }
    } else if (g.qubits.size() > 2) {
      throw DataError("route expects at most two-qubit gates");
    }
    GateInstance mapped = g;
    for (int& q : mapped.qubits) q = log2phys[q];
    out.add(std::move(mapped));
  }
  std::vector<int> layout(log2phys.begin(), log2phys.begin() + c.num_qubits());
  return RoutedCircuit{std::move(out), std::move(layout)};
}

namespace {

CompiledCircuit score(const Circuit& phys, std::vector<int> layout, const DeviceProfile& p) {
  CompiledCircuit cc;
  cc.num_qubits = phys.num_qubits();
  cc.ops = phys.ops();
  cc.depth = circuit_depth(cc.ops);
  cc.layout = std::move(layout);
  cc.device_name = p.name();
  cc.fidelities.reserve(cc.ops.size());
  for (const auto& g : cc.ops) cc.fidelities.push_back(p.gate_fidelity(g.kind, g.qubits));
  return cc;
}

}  // namespace

CompiledCircuit compile_for(const Circuit& c, const DeviceProfile& p) {
  auto routed = route(rebase(lower_to_canonical(c), p), p);
  return score(routed.circuit, std::move(routed.layout), p);
}

CompiledCircuit score_compiled(const Circuit& compiled, const DeviceProfile& p) {
  if (compiled.num_qubits() > p.num_qubits()) {
    throw DataError("precompiled circuit uses more qubits than " + p.name() + " provides");
  }
  std::vector<int> layout(compiled.num_qubits());
  for (int i = 0; i < compiled.num_qubits(); ++i) layout[i] = i;
  // gate_fidelity rejects non-basis gates and uncoupled pairs.
  return score(compiled, std::move(layout), p);
}

nlohmann::json to_json(const CompiledCircuit& cc) {
  nlohmann::json ops = nlohmann::json::array();
  for (const auto& g : cc.ops) {
    ops.push_back({{"gate", std::string(gate_name(g.kind))}, {"qubits", g.qubits}, {"params", g.params}});
  }
  return {{"device_name", cc.device_name}, {"num_qubits", cc.num_qubits}, {"ops", ops},
          {"depth", cc.depth},             {"fidelities", cc.fidelities}, {"layout", cc.layout}};
}

}  // namespace qtp
