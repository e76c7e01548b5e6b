#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "qtp/tensor.hpp"

namespace qtp::ad {

class Tape;

/// Handle to a value recorded on a tape.
struct Var {
  Tape* tape = nullptr;
  int id = -1;

  const Tensor& value() const;
  int rows() const { return value().rows(); }
  int cols() const { return value().cols(); }
};

/// Reverse-mode recorder. Nodes are replayed backwards in recording order.
/// Single-threaded; use one tape per thread.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  /// Leaf bound to caller-owned storage (not copied). Its gradient is
  /// accumulated by backward() and read with grad().
  Var param(const Tensor& storage);

  const Tensor& value(Var v) const;
  /// Gradient of the last backward() loss; zeros if v did not influence it.
  const Tensor& grad(Var v);

  /// Throws DataError unless loss is a 1x1 node of this tape.
  void backward(Var loss);

  std::size_t size() const noexcept { return nodes_.size(); }

  // Used by op implementations.
  using Backward = std::function<void(Tape&, int self)>;
  Var record(Tensor value, std::initializer_list<Var> parents, Backward bw);
  Var record(Tensor value, std::span<const Var> parents, Backward bw);
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
  Tensor& grad_ref(int id);
  const Tensor& grad_of(int id) const { return nodes_[id].grad; }

 private:
  struct Node {
    Tensor value;
    const Tensor* external = nullptr;
    Tensor grad;
    bool requires_grad = false;
    Backward backward;
  };
  void check(Var v) const;

  std::vector<Node> nodes_;
};

// Forward primitives. All throw DataError on shape mismatch.
Var matmul(Var a, Var b);
/// b has a's shape, or is 1 x cols and is broadcast over rows.
Var add(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
/// out[i, :] = a[i, :] * s[i]; s is rows x 1.
Var mul_rows(Var a, Var s);
Var concat_cols(std::span<const Var> parts);
Var leaky_relu(Var a, double alpha);
Var row_softmax(Var a);
Var log(Var a);
Var clamp_min(Var a, double lo);
Var sum(Var a);
Var gather_rows(Var a, std::span<const int> index);
Var spmm(const SparseMatrix& s, Var x);
/// Per-segment mean over rows; every segment must be non-empty.
Var segment_mean(Var a, std::span<const int> segment_ids, int num_segments);
Var segment_sum(Var a, std::span<const int> segment_ids, int num_segments);
/// Softmax of a column vector within each segment.
Var segment_softmax(Var scores, std::span<const int> segment_ids, int num_segments);

/// Builds a scalar loss from parameter leaves on a fresh tape.
using LossBuilder = std::function<Var(Tape&, std::span<const Var> params)>;

/// Max relative error between backward() gradients and central differences,
/// with denominator max(|analytic|, |numeric|, 1e-8). Returns 0 for no params.
double finite_diff_check(const LossBuilder& f, std::span<Tensor* const> params, double eps = 1e-5);

}  // namespace qtp::ad
