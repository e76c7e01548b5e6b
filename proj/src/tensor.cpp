#include "qtp/tensor.hpp"

#include <algorithm>

#include <Eigen/Core>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "qtp/error.hpp"

namespace qtp::ad {

void tune_allocator() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 512 << 20);
#endif
}

Tensor::Tensor(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {
  if (rows < 0 || cols < 0) throw DataError("negative tensor dimension");
}

Tensor::Tensor(int rows, int cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows < 0 || cols < 0 || data_.size() != static_cast<std::size_t>(rows) * cols) {
    throw DataError("tensor data length does not match its shape");
  }
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols,
                                         std::vector<std::pair<std::pair<int, int>, double>> t) {
  std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseMatrix s;
  s.rows = rows;
  s.cols = cols;
  s.row_ptr.assign(rows + 1, 0);
  for (std::size_t i = 0; i < t.size();) {
    const auto [r, c] = t[i].first;
    if (r < 0 || r >= rows || c < 0 || c >= cols) throw DataError("sparse entry out of range");
    double v = 0.0;
    std::size_t j = i;
    for (; j < t.size() && t[j].first == t[i].first; ++j) v += t[j].second;
    s.col_idx.push_back(c);
    s.values.push_back(v);
    ++s.row_ptr[r + 1];
    i = j;
  }
  for (int r = 0; r < rows; ++r) s.row_ptr[r + 1] += s.row_ptr[r];
  return s;
}

Tensor SparseMatrix::to_dense() const {
  Tensor d(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) d(r, col_idx[k]) += values[k];
  return d;
}

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap = Eigen::Map<RowMajor>;

ConstMap view(const Tensor& t) { return ConstMap(t.data().data(), t.rows(), t.cols()); }
MutMap view(Tensor& t) { return MutMap(t.data().data(), t.rows(), t.cols()); }

// One-hot node features are mostly zeros; row-wise axpy skips them.
bool mostly_zero(const Tensor& t) {
  std::size_t nz = 0;
  for (double v : t.data()) nz += v != 0.0;
  return nz * 4 < t.size();
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) throw DataError("matmul shape mismatch");
  Tensor out(a.rows(), b.cols());
  if (out.size() == 0 || a.cols() == 0) return out;
  if (!mostly_zero(a)) {
    view(out).noalias() = view(a) * view(b);
    return out;
  }
  const int n = b.cols();
  for (int i = 0; i < a.rows(); ++i) {
    double* o = out.row(i);
    const double* ar = a.row(i);
    for (int p = 0; p < a.cols(); ++p) {
      if (ar[p] == 0.0) continue;
      const double v = ar[p];
      const double* br = b.row(p);
      for (int j = 0; j < n; ++j) o[j] += v * br[j];
    }
  }
  return out;
}

void matmul_acc_tn(const Tensor& a, const Tensor& g, Tensor& out) {
  if (a.rows() != g.rows() || out.rows() != a.cols() || out.cols() != g.cols()) {
    throw DataError("matmul_acc_tn shape mismatch");
  }
  if (out.size() == 0 || a.rows() == 0) return;
  if (!mostly_zero(a)) {
    view(out).noalias() += view(a).transpose() * view(g);
    return;
  }
  const int n = g.cols();
  for (int i = 0; i < a.rows(); ++i) {
    const double* ar = a.row(i);
    const double* gr = g.row(i);
    for (int p = 0; p < a.cols(); ++p) {
      if (ar[p] == 0.0) continue;
      const double v = ar[p];
      double* o = out.row(p);
      for (int j = 0; j < n; ++j) o[j] += v * gr[j];
    }
  }
}

void matmul_acc_nt(const Tensor& g, const Tensor& b, Tensor& out) {
  if (g.cols() != b.cols() || out.rows() != g.rows() || out.cols() != b.rows()) {
    throw DataError("matmul_acc_nt shape mismatch");
  }
  if (out.size() != 0 && g.cols() != 0) view(out).noalias() += view(g) * view(b).transpose();
}

Tensor spmm(const SparseMatrix& s, const Tensor& x) {
  if (s.cols != x.rows()) throw DataError("spmm shape mismatch");
  Tensor out(s.rows, x.cols());
  const int n = x.cols();
  for (int r = 0; r < s.rows; ++r) {
    double* o = out.row(r);
    for (int k = s.row_ptr[r]; k < s.row_ptr[r + 1]; ++k) {
      const double v = s.values[k];
      const double* xr = x.row(s.col_idx[k]);
      for (int j = 0; j < n; ++j) o[j] += v * xr[j];
    }
  }
  return out;
}

void spmm_acc_t(const SparseMatrix& s, const Tensor& g, Tensor& out) {
  const int n = g.cols();
  for (int r = 0; r < s.rows; ++r) {
    const double* gr = g.row(r);
    for (int k = s.row_ptr[r]; k < s.row_ptr[r + 1]; ++k) {
      const double v = s.values[k];
      double* o = out.row(s.col_idx[k]);
      for (int j = 0; j < n; ++j) o[j] += v * gr[j];
    }
  }
}

}  // namespace qtp::ad
