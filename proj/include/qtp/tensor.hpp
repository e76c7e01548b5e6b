#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace qtp::ad {

/// Row-major 2-D float64 array. Vectors are stored as n x 1 or 1 x n.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int rows, int cols, double fill = 0.0);
  Tensor(int rows, int cols, std::vector<double> data);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool same_shape(const Tensor& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }

  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double* row(int r) { return data_.data() + static_cast<std::size_t>(r) * cols_; }
  const double* row(int r) const { return data_.data() + static_cast<std::size_t>(r) * cols_; }

  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  bool operator==(const Tensor&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

/// Compressed-row sparse matrix used as a constant operator.
struct SparseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr;  // rows + 1
  std::vector<int> col_idx;
  std::vector<double> values;

  /// Builds from (row, col, value) triplets; duplicates are summed.
  static SparseMatrix from_triplets(int rows, int cols,
                                    std::vector<std::pair<std::pair<int, int>, double>> triplets);
  Tensor to_dense() const;
};

/// Raises the allocator's mmap threshold so per-batch tensor buffers are
/// recycled from the heap. No-op outside glibc. Call once at startup.
void tune_allocator();

// Kernels. `acc` variants add into `out`.
Tensor matmul(const Tensor& a, const Tensor& b);
void matmul_acc_tn(const Tensor& a, const Tensor& g, Tensor& out);  // out += a^T g
void matmul_acc_nt(const Tensor& g, const Tensor& b, Tensor& out);  // out += g b^T
Tensor spmm(const SparseMatrix& s, const Tensor& x);
void spmm_acc_t(const SparseMatrix& s, const Tensor& g, Tensor& out);  // out += s^T g

}  // namespace qtp::ad
