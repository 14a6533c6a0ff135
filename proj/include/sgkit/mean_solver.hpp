#pragma once

// Sparse direct factorization of the (scaled) mean matrix, factored once and
// reused for every inner deterministic solve.

#include <atomic>
#include <cstdint>
#include <span>
#include <stdexcept>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "sgkit/block_vector.hpp"
#include "sgkit/sparse.hpp"

namespace sgkit {

class MeanSolver {
 public:
  MeanSolver(const SparseMatrix& k0, double scale = 1.0) : n_(k0.rows()) {
    if (scale == 0.0) throw std::invalid_argument("MeanSolver: scale must be nonzero");
    if (k0.rows() != k0.cols()) throw std::invalid_argument("MeanSolver: matrix must be square");
    Eigen::SparseMatrix<double> m(k0.rows(), k0.cols());
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(k0.nnz());
    for (int r = 0; r < k0.rows(); ++r)
      for (int p = k0.row_ptr()[static_cast<std::size_t>(r)]; p < k0.row_ptr()[static_cast<std::size_t>(r) + 1]; ++p)
        trips.emplace_back(r, k0.col_idx()[static_cast<std::size_t>(p)],
                           scale * k0.values()[static_cast<std::size_t>(p)]);
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();
    lu_.compute(m);
    if (lu_.info() != Eigen::Success)
      throw std::runtime_error("MeanSolver: sparse LU factorization failed (singular matrix?)");
    factorization_count_ = 1;
  }

  int size() const { return n_; }

  /// x = (scale * K0)^{-1} b. Reentrant for distinct right-hand sides.
  void solve(std::span<const double> b, std::span<double> x) const {
    Eigen::Map<const Eigen::VectorXd> bm(b.data(), n_);
    Eigen::VectorXd sol = lu_.solve(bm);
    if (lu_.info() != Eigen::Success) throw std::runtime_error("MeanSolver: solve failed");
    Eigen::Map<Eigen::VectorXd>(x.data(), n_) = sol;
    solve_count_.fetch_add(1, std::memory_order_relaxed);
  }

  /// Blockwise solve of a whole block vector.
  void solve_blocks(const BlockVector& b, BlockVector& x) const {
    for (int k = 0; k < b.n_blocks(); ++k) solve(b.block(k), x.block(k));
  }

  std::uint64_t solve_count() const { return solve_count_.load(std::memory_order_relaxed); }
  std::uint64_t factorization_count() const { return factorization_count_; }

 private:
  int n_ = 0;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  std::uint64_t factorization_count_ = 0;
  mutable std::atomic<std::uint64_t> solve_count_{0};
};

}  // namespace sgkit
