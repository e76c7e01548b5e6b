#include "qtp/tape.hpp"

#include <algorithm>
#include <cmath>

#include "qtp/error.hpp"

namespace qtp::ad {

const Tensor& Var::value() const { return tape->value(*this); }

void Tape::check(Var v) const {
  if (v.tape != this || v.id < 0 || v.id >= static_cast<int>(nodes_.size())) {
    throw DataError("variable does not belong to this tape");
  }
}

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), nullptr, {}, false, {}});
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::param(const Tensor& storage) {
  nodes_.push_back(Node{{}, &storage, {}, true, {}});
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

const Tensor& Tape::value(Var v) const {
  check(v);
  const Node& n = nodes_[v.id];
  return n.external ? *n.external : n.value;
}

Tensor& Tape::grad_ref(int id) {
  Node& n = nodes_[id];
  const Tensor& v = n.external ? *n.external : n.value;
  if (!n.grad.same_shape(v) || n.grad.size() != v.size()) n.grad = Tensor(v.rows(), v.cols());
  return n.grad;
}

const Tensor& Tape::grad(Var v) {
  check(v);
  return grad_ref(v.id);
}

Var Tape::record(Tensor value, std::initializer_list<Var> parents, Backward bw) {
  return record(std::move(value), std::span<const Var>(parents.begin(), parents.size()), std::move(bw));
}

Var Tape::record(Tensor value, std::span<const Var> parents, Backward bw) {
  bool rg = false;
  for (Var p : parents) {
    check(p);
    rg = rg || nodes_[p.id].requires_grad;
  }
#ifndef NDEBUG
  for (double x : value.data()) {
    if (!std::isfinite(x)) throw DataError("non-finite value produced by a forward op");
  }
#endif
  nodes_.push_back(Node{std::move(value), nullptr, {}, rg, rg ? std::move(bw) : Backward{}});
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

void Tape::backward(Var loss) {
  check(loss);
  const Tensor& lv = value(loss);
  if (lv.rows() != 1 || lv.cols() != 1) throw DataError("backward needs a scalar loss");
  for (auto& n : nodes_) n.grad = Tensor();
  grad_ref(loss.id)(0, 0) = 1.0;
  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.backward || n.grad.size() == 0) continue;
    n.backward(*this, i);
  }
}

namespace {

[[noreturn]] void shape_error(const char* op) { throw DataError(std::string(op) + ": shape mismatch"); }

void require_same_tape(Var a, Var b) {
  if (a.tape != b.tape) throw DataError("variables from different tapes");
}

}  // namespace

Var matmul(Var a, Var b) {
  require_same_tape(a, b);
  Tape& t = *a.tape;
  Tensor out = ad::matmul(a.value(), b.value());
  const int ia = a.id, ib = b.id;
  return t.record(std::move(out), {a, b}, [ia, ib](Tape& tp, int self) {
    const Tensor& g = tp.grad_of(self);
    if (tp.requires_grad({&tp, ia})) matmul_acc_nt(g, tp.value({&tp, ib}), tp.grad_ref(ia));
    if (tp.requires_grad({&tp, ib})) matmul_acc_tn(tp.value({&tp, ia}), g, tp.grad_ref(ib));
  });
}

Var add(Var a, Var b) {
  require_same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  const bool broadcast = !av.same_shape(bv);
  if (broadcast && !(bv.rows() == 1 && bv.cols() == av.cols())) shape_error("add");
  Tensor out = av;
  for (int r = 0; r < out.rows(); ++r) {
    double* o = out.row(r);
    const double* br = bv.row(broadcast ? 0 : r);
    for (int c = 0; c < out.cols(); ++c) o[c] += br[c];
  }
  const int ia = a.id, ib = b.id;
  return a.tape->record(std::move(out), {a, b}, [ia, ib, broadcast](Tape& tp, int self) {
    const Tensor& g = tp.grad_of(self);
    if (tp.requires_grad({&tp, ia})) {
      auto& ga = tp.grad_ref(ia).data();
      for (std::size_t k = 0; k < ga.size(); ++k) ga[k] += g.data()[k];
    }
    if (tp.requires_grad({&tp, ib})) {
      Tensor& gb = tp.grad_ref(ib);
      for (int r = 0; r < g.rows(); ++r) {
        double* o = gb.row(broadcast ? 0 : r);
        const double* gr = g.row(r);
        for (int c = 0; c < g.cols(); ++c) o[c] += gr[c];
      }
    }
  });
}

Var mul(Var a, Var b) {
  require_same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (!av.same_shape(bv)) shape_error("mul");
  Tensor out = av;
  for (std::size_t k = 0; k < out.size(); ++k) out.data()[k] *= bv.data()[k];
  const int ia = a.id, ib = b.id;
  return a.tape->record(std::move(out), {a, b}, [ia, ib](Tape& tp, int self) {
    const auto& g = tp.grad_of(self).data();
    if (tp.requires_grad({&tp, ia})) {
      auto& ga = tp.grad_ref(ia).data();
      const auto& bv2 = tp.value({&tp, ib}).data();
      for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * bv2[k];
    }
    if (tp.requires_grad({&tp, ib})) {
      auto& gb = tp.grad_ref(ib).data();
      const auto& av2 = tp.value({&tp, ia}).data();
      for (std::size_t k = 0; k < g.size(); ++k) gb[k] += g[k] * av2[k];
    }
  });
}

Var scale(Var a, double s) {
  Tensor out = a.value();
  for (double& x : out.data()) x *= s;
  const int ia = a.id;
  return a.tape->record(std::move(out), {a}, [ia, s](Tape& tp, int self) {
    const auto& g = tp.grad_of(self).data();
    auto& ga = tp.grad_ref(ia).data();
    for (std::size_t k = 0; k < g.size(); ++k) ga[k] += s * g[k];
  });
}

Var mul_rows(Var a, Var s) {
  require_same_tape(a, s);
  const Tensor& av = a.value();
  const Tensor& sv = s.value();
  if (sv.cols() != 1 || sv.rows() != av.rows()) shape_error("mul_rows");
  Tensor out = av;
  for (int r = 0; r < out.rows(); ++r) {
    double* o = out.row(r);
    for (int c = 0; c < out.cols(); ++c) o[c] *= sv(r, 0);
  }
  const int ia = a.id, is = s.id;
  return a.tape->record(std::move(out), {a, s}, [ia, is](Tape& tp, int self) {
    const Tensor& g = tp.grad_of(self);
    const Tensor& a2 = tp.value({&tp, ia});
    const Tensor& s2 = tp.value({&tp, is});
    const bool ga_on = tp.requires_grad({&tp, ia});
    const bool gs_on = tp.requires_grad({&tp, is});
    for (int r = 0; r < g.rows(); ++r) {
      const double* gr = g.row(r);
      if (ga_on) {
        double* o = tp.grad_ref(ia).row(r);
        for (int c = 0; c < g.cols(); ++c) o[c] += gr[c] * s2(r, 0);
      }
      if (gs_on) {
        const double* ar = a2.row(r);
        double acc = 0.0;
        for (int c = 0; c < g.cols(); ++c) acc += gr[c] * ar[c];
        tp.grad_ref(is)(r, 0) += acc;
      }
    }
  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw DataError("concat of nothing");
  Tape& t = *parts[0].tape;
  const int rows = parts[0].rows();
  int cols = 0;
  for (Var p : parts) {
    require_same_tape(parts[0], p);
    if (p.rows() != rows) shape_error("concat_cols");
    cols += p.cols();
  }
  Tensor out(rows, cols);
  std::vector<int> ids, offsets;
  int off = 0;
  for (Var p : parts) {
    const Tensor& pv = p.value();
    for (int r = 0; r < rows; ++r) std::copy(pv.row(r), pv.row(r) + pv.cols(), out.row(r) + off);
    ids.push_back(p.id);
    offsets.push_back(off);
    off += pv.cols();
  }
  return t.record(std::move(out), parts, [ids, offsets](Tape& tp, int self) {
    const Tensor& g = tp.grad_of(self);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (!tp.requires_grad({&tp, ids[k]})) continue;
      Tensor& gp = tp.grad_ref(ids[k]);
      for (int r = 0; r < g.rows(); ++r) {
        const double* gr = g.row(r) + offsets[k];
        double* o = gp.row(r);
        for (int c = 0; c < gp.cols(); ++c) o[c] += gr[c];
      }
    }
  });
}

Var leaky_relu(Var a, double alpha) {
  Tensor out = a.value();
  for (double& x : out.data()) x = x >= 0.0 ? x : alpha * x;
  const int ia = a.id;
  return a.tape->record(std::move(out), {a}, [ia, alpha](Tape& tp, int self) {
    const auto& g = tp.grad_of(self).data();
    const auto& x = tp.value({&tp, ia}).data();
    auto& ga = tp.grad_ref(ia).data();
    for (std::size_t k = 0; k < g.size(); ++k) ga[k] += x[k] >= 0.0 ? g[k] : alpha * g[k];
  });
}

Var row_softmax(Var a) {
  Tensor out = a.value();
  for (int r = 0; r < out.rows(); ++r) {
    double* o = out.row(r);
    const double m = *std::max_element(o, o + out.cols());
    double z = 0.0;
    for (int c = 0; c < out.cols(); ++c) z += (o[c] = std::exp(o[c] - m));
    for (int c = 0; c < out.cols(); ++c) o[c] /= z;
  }
  const int ia = a.id;
  return a.tape->record(std::move(out), {a}, [ia](Tape& tp, int self) {
    const Tensor& g = tp.grad_of(self);
    const Tensor& y = tp.value({&tp, self});
    Tensor& ga = tp.grad_ref(ia);
    for (int r = 0; r < g.rows(); ++r) {
      double dot = 0.0;
      for (int c = 0; c < g.cols(); ++c) dot += g(r, c) * y(r, c);
      for (int c = 0; c < g.cols(); ++c) ga(r, c) += y(r, c) * (g(r, c) - dot);
    }
  });
}

Var log(Var a) {
  Tensor out = a.value();
  for (double& x : out.data()) {
    if (!(x > 0.0)) throw DataError("log of a non-positive value");
    x = std::log(x);
  }
  const int ia = a.id;
  return a.tape->record(std::move(out), {a}, [ia](Tape& tp, int self) {
    const auto& g = tp.grad_of(self).data();
    const auto& x = tp.value({&tp, ia}).data();
    auto& ga = tp.grad_ref(ia).data();
    for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] / x[k];
  });
}

Var clamp_min(Var a, double lo) {
  Tensor out = a.value();
  for (double& x : out.data()) x = std::max(x, lo);
  const int ia = a.id;
  return a.tape->record(std::move(out), {a}, [ia, lo](Tape& tp, int self) {
    const auto& g = tp.grad_of(self).data();
    const auto& x = tp.value({&tp, ia}).data();
    auto& ga = tp.grad_ref(ia).data();
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (x[k] >= lo) ga[k] += g[k];
    }
  });
}

Var sum(Var a) {
  double s = 0.0;
  for (double x : a.value().data()) s += x;
  const int ia = a.id;
  return a.tape->record(Tensor(1, 1, s), {a}, [ia](Tape& tp, int self) {
    const double g = tp.grad_of(self)(0, 0);
    for (double& x : tp.grad_ref(ia).data()) x += g;
  });
}

Var gather_rows(Var a, std::span<const int> index) {
  const Tensor& av = a.value();
  Tensor out(static_cast<int>(index.size()), av.cols());
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] < 0 || index[i] >= av.rows()) throw DataError("gather_rows: index out of range");
    std::copy(av.row(index[i]), av.row(index[i]) + av.cols(), out.row(static_cast<int>(i)));
  }
  const int ia = a.id;
  auto idx = std::make_shared<std::vector<int>>(index.begin(), index.end());
  return a.tape->record(std::move(out), {a}, [ia, idx](Tape& tp, int self) {
    const Tensor& g = tp.grad_of(self);
    Tensor& ga = tp.grad_ref(ia);
    for (std::size_t i = 0; i < idx->size(); ++i) {
      const double* gr = g.row(static_cast<int>(i));
      double* o = ga.row((*idx)[i]);
      for (int c = 0; c < g.cols(); ++c) o[c] += gr[c];
    }
  });
}

Var spmm(const SparseMatrix& s, Var x) {
  Tensor out = ad::spmm(s, x.value());
  const int ix = x.id;
  const SparseMatrix* sp = &s;
  return x.tape->record(std::move(out), {x}, [ix, sp](Tape& tp, int self) {
    spmm_acc_t(*sp, tp.grad_of(self), tp.grad_ref(ix));
  });
}

namespace {

std::vector<int> check_segments(std::span<const int> ids, int rows, int n) {
  if (static_cast<int>(ids.size()) != rows) throw DataError("segment ids do not match row count");
  std::vector<int> counts(n, 0);
  for (int s : ids) {
    if (s < 0 || s >= n) throw DataError("segment id out of range");
    ++counts[s];
  }
  for (int c : counts) {
    if (c == 0) throw DataError("empty segment");
  }
  return counts;
}

}  // namespace

Var segment_sum(Var a, std::span<const int> segment_ids, int num_segments) {
  const Tensor& av = a.value();
  check_segments(segment_ids, av.rows(), num_segments);
  Tensor out(num_segments, av.cols());
  for (int r = 0; r < av.rows(); ++r) {
    double* o = out.row(segment_ids[r]);
    const double* ar = av.row(r);
    for (int c = 0; c < av.cols(); ++c) o[c] += ar[c];
  }
  const int ia = a.id;
  auto ids = std::make_shared<std::vector<int>>(segment_ids.begin(), segment_ids.end());
  return a.tape->record(std::move(out), {a}, [ia, ids](Tape& tp, int self) {
    const Tensor& g = tp.grad_of(self);
    Tensor& ga = tp.grad_ref(ia);
    for (int r = 0; r < ga.rows(); ++r) {
      const double* gr = g.row((*ids)[r]);
      double* o = ga.row(r);
      for (int c = 0; c < ga.cols(); ++c) o[c] += gr[c];
    }
  });
}

Var segment_mean(Var a, std::span<const int> segment_ids, int num_segments) {
  const Tensor& av = a.value();
  const auto counts = check_segments(segment_ids, av.rows(), num_segments);
  Tensor out(num_segments, av.cols());
  for (int r = 0; r < av.rows(); ++r) {
    double* o = out.row(segment_ids[r]);
    const double* ar = av.row(r);
    for (int c = 0; c < av.cols(); ++c) o[c] += ar[c];
  }
  for (int s = 0; s < num_segments; ++s) {
    double* o = out.row(s);
    for (int c = 0; c < out.cols(); ++c) o[c] /= counts[s];
  }
  const int ia = a.id;
  auto ids = std::make_shared<std::vector<int>>(segment_ids.begin(), segment_ids.end());
  auto cnt = std::make_shared<std::vector<int>>(counts);
  return a.tape->record(std::move(out), {a}, [ia, ids, cnt](Tape& tp, int self) {
    const Tensor& g = tp.grad_of(self);
    Tensor& ga = tp.grad_ref(ia);
    for (int r = 0; r < ga.rows(); ++r) {
      const int s = (*ids)[r];
      const double inv = 1.0 / (*cnt)[s];
      const double* gr = g.row(s);
      double* o = ga.row(r);
      for (int c = 0; c < ga.cols(); ++c) o[c] += gr[c] * inv;
    }
  });
}

Var segment_softmax(Var scores, std::span<const int> segment_ids, int num_segments) {
  const Tensor& sv = scores.value();
  if (sv.cols() != 1) shape_error("segment_softmax");
  check_segments(segment_ids, sv.rows(), num_segments);
  std::vector<double> mx(num_segments, -std::numeric_limits<double>::infinity());
  for (int r = 0; r < sv.rows(); ++r) mx[segment_ids[r]] = std::max(mx[segment_ids[r]], sv(r, 0));
  Tensor out(sv.rows(), 1);
  std::vector<double> z(num_segments, 0.0);
  for (int r = 0; r < sv.rows(); ++r) z[segment_ids[r]] += (out(r, 0) = std::exp(sv(r, 0) - mx[segment_ids[r]]));
  for (int r = 0; r < sv.rows(); ++r) out(r, 0) /= z[segment_ids[r]];
  const int is = scores.id;
  auto ids = std::make_shared<std::vector<int>>(segment_ids.begin(), segment_ids.end());
  return scores.tape->record(std::move(out), {scores}, [is, ids, num_segments](Tape& tp, int self) {
    const Tensor& g = tp.grad_of(self);
    const Tensor& y = tp.value({&tp, self});
    std::vector<double> dot(num_segments, 0.0);
    for (int r = 0; r < g.rows(); ++r) dot[(*ids)[r]] += g(r, 0) * y(r, 0);
    Tensor& gs = tp.grad_ref(is);
    for (int r = 0; r < g.rows(); ++r) gs(r, 0) += y(r, 0) * (g(r, 0) - dot[(*ids)[r]]);
  });
}

double finite_diff_check(const LossBuilder& f, std::span<Tensor* const> params, double eps) {
  if (params.empty()) return 0.0;
  std::vector<Tensor> analytic;
  {
    Tape tape;
    std::vector<Var> vars;
    for (Tensor* p : params) vars.push_back(tape.param(*p));
    tape.backward(f(tape, vars));
    for (Var v : vars) analytic.push_back(tape.grad(v));
  }
  auto eval = [&] {
    Tape tape;
    std::vector<Var> vars;
    for (Tensor* p : params) vars.push_back(tape.param(*p));
    return f(tape, vars).value()(0, 0);
  };
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& data = params[i]->data();
    for (std::size_t k = 0; k < data.size(); ++k) {
      const double saved = data[k];
      data[k] = saved + eps;
      const double up = eval();
      data[k] = saved - eps;
      const double down = eval();
      data[k] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[i].data()[k];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace qtp::ad
