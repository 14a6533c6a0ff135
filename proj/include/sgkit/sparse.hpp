#pragma once

// Compressed-row sparse matrix, just enough for FEM assembly and the
// matrix-free stochastic Galerkin apply.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

namespace sgkit {

struct Triplet {
  int row, col;
  double value;
};

class SparseMatrix {
 public:
  SparseMatrix() = default;

  static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> trips) {
    std::sort(trips.begin(), trips.end(), [](const Triplet& a, const Triplet& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    SparseMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.row_ptr_.assign(static_cast<std::size_t>(rows) + 1, 0);
    for (std::size_t t = 0; t < trips.size();) {
      std::size_t t2 = t;
      double sum = 0.0;
      while (t2 < trips.size() && trips[t2].row == trips[t].row && trips[t2].col == trips[t].col)
        sum += trips[t2++].value;
      m.col_idx_.push_back(trips[t].col);
      m.vals_.push_back(sum);
      ++m.row_ptr_[static_cast<std::size_t>(trips[t].row) + 1];
      t = t2;
    }
    for (int r = 0; r < rows; ++r)
      m.row_ptr_[static_cast<std::size_t>(r) + 1] += m.row_ptr_[static_cast<std::size_t>(r)];
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return vals_.size(); }
  std::span<const int> row_ptr() const { return row_ptr_; }
  std::span<const int> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return vals_; }

  double coeff(int r, int c) const {
    for (int p = row_ptr_[static_cast<std::size_t>(r)]; p < row_ptr_[static_cast<std::size_t>(r) + 1]; ++p)
      if (col_idx_[static_cast<std::size_t>(p)] == c) return vals_[static_cast<std::size_t>(p)];
    return 0.0;
  }

  /// y = A x
  void gemv(std::span<const double> x, std::span<double> y) const {
    for (int r = 0; r < rows_; ++r) {
      double s = 0.0;
      for (int p = row_ptr_[static_cast<std::size_t>(r)]; p < row_ptr_[static_cast<std::size_t>(r) + 1]; ++p)
        s += vals_[static_cast<std::size_t>(p)] * x[static_cast<std::size_t>(col_idx_[static_cast<std::size_t>(p)])];
      y[static_cast<std::size_t>(r)] = s;
    }
  }

  /// y += alpha * A x
  void gemv_add(double alpha, std::span<const double> x, std::span<double> y) const {
    for (int r = 0; r < rows_; ++r) {
      double s = 0.0;
      for (int p = row_ptr_[static_cast<std::size_t>(r)]; p < row_ptr_[static_cast<std::size_t>(r) + 1]; ++p)
        s += vals_[static_cast<std::size_t>(p)] * x[static_cast<std::size_t>(col_idx_[static_cast<std::size_t>(p)])];
      y[static_cast<std::size_t>(r)] += alpha * s;
    }
  }

  /// Frobenius inner product <A, B> over the union pattern (per-row merge).
  double frobenius_dot(const SparseMatrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_)
      throw std::invalid_argument("frobenius_dot: shape mismatch");
    double s = 0.0;
    for (int r = 0; r < rows_; ++r) {
      int pa = row_ptr_[static_cast<std::size_t>(r)];
      int pb = other.row_ptr_[static_cast<std::size_t>(r)];
      const int ea = row_ptr_[static_cast<std::size_t>(r) + 1];
      const int eb = other.row_ptr_[static_cast<std::size_t>(r) + 1];
      while (pa < ea && pb < eb) {
        const int ca = col_idx_[static_cast<std::size_t>(pa)];
        const int cb = other.col_idx_[static_cast<std::size_t>(pb)];
        if (ca == cb) {
          s += vals_[static_cast<std::size_t>(pa)] * other.vals_[static_cast<std::size_t>(pb)];
          ++pa;
          ++pb;
        } else if (ca < cb) {
          ++pa;
        } else {
          ++pb;
        }
      }
    }
    return s;
  }

  /// Matrix Market coordinate format (1-based, general).
  void write_matrix_market(std::ostream& os) const {
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << rows_ << ' ' << cols_ << ' ' << nnz() << '\n';
    char buf[64];
    for (int r = 0; r < rows_; ++r)
      for (int p = row_ptr_[static_cast<std::size_t>(r)]; p < row_ptr_[static_cast<std::size_t>(r) + 1]; ++p) {
        std::snprintf(buf, sizeof(buf), "%d %d %.17g", r + 1,
                      col_idx_[static_cast<std::size_t>(p)] + 1, vals_[static_cast<std::size_t>(p)]);
        os << buf << '\n';
      }
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> vals_;
};

}  // namespace sgkit
