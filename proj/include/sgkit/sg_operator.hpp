#pragma once

// The global stochastic Galerkin operator as a matrix-free block operator:
// v_k = sum_j sum_i c_ijk K_i u_j, evaluated fiber-wise so each product
// y = K_i u_j is formed once and scattered to every k sharing (i, j).

#include <atomic>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "sgkit/block_vector.hpp"
#include "sgkit/sparse.hpp"
#include "sgkit/triple_product.hpp"

namespace sgkit {

namespace detail {

/// Relaxed event counter that stays copyable/movable with its owner.
struct RelaxedCounter {
  mutable std::atomic<std::uint64_t> value{0};
  RelaxedCounter() = default;
  RelaxedCounter(const RelaxedCounter& o) : value(o.value.load(std::memory_order_relaxed)) {}
  RelaxedCounter& operator=(const RelaxedCounter& o) {
    value.store(o.value.load(std::memory_order_relaxed), std::memory_order_relaxed);
    return *this;
  }
  void bump() const { value.fetch_add(1, std::memory_order_relaxed); }
};

}  // namespace detail

class SGOperator final : public BlockOperator {
 public:
  SGOperator() = default;
  SGOperator(std::shared_ptr<const std::vector<SparseMatrix>> matrices, TripleProductTensor tensor)
      : matrices_(std::move(matrices)), tensor_(std::move(tensor)) {
    if (!matrices_ || matrices_->empty())
      throw std::invalid_argument("SGOperator: need at least the mean matrix");
    if (static_cast<int>(matrices_->size()) < tensor_.n_coeff())
      throw std::invalid_argument("SGOperator: tensor coefficient range exceeds matrix list");
    n_blocks_ = tensor_.n_basis();
    block_len_ = (*matrices_)[0].rows();
    build_fibers();
  }

  int n_blocks() const { return n_blocks_; }
  int block_len() const { return block_len_; }
  const TripleProductTensor& tensor() const { return tensor_; }
  const SparseMatrix& matrix(int i) const { return (*matrices_)[static_cast<std::size_t>(i)]; }
  int n_matrices() const { return static_cast<int>(matrices_->size()); }
  double c0kk(int k) const { return c0kk_[static_cast<std::size_t>(k)]; }

  /// Number of distinct (i, j) fibers = sparse matvecs per full apply.
  std::size_t n_fibers() const { return n_fibers_; }
  std::uint64_t matvec_count() const { return matvec_count_.value.load(std::memory_order_relaxed); }
  void reset_matvec_count() const { matvec_count_.value.store(0, std::memory_order_relaxed); }

  void apply(const BlockVector& u, BlockVector& v) const override { apply_impl(u, v, false); }

  /// Same contraction restricted to i >= 1 (the off-mean part used by the
  /// relaxation right-hand sides).
  void apply_higher(const BlockVector& u, BlockVector& v) const { apply_impl(u, v, true); }

  /// Gauss-Seidel inner update for source block j: for every i >= 1 fiber at
  /// j compute y = K_i u_j once and subtract c_ijk y from z_k (and r_k).
  void gs_source_update(int j, std::span<const double> u_j, BlockVector& z, BlockVector* r) const {
    std::vector<double> y(static_cast<std::size_t>(block_len_));
    for (const auto& fiber : fibers_[static_cast<std::size_t>(j)]) {
      if (fiber.i == 0) continue;
      matrix(fiber.i).gemv(u_j, y);
      matvec_count_.bump();
      for (const auto& [k, c] : fiber.targets) {
        auto zk = z.block(k);
        for (std::size_t n = 0; n < y.size(); ++n) zk[n] -= c * y[n];
        if (r) {
          auto rk = r->block(k);
          for (std::size_t n = 0; n < y.size(); ++n) rk[n] -= c * y[n];
        }
      }
    }
  }

  /// y = K_0 x, counted as a matvec.
  void mean_matvec(std::span<const double> x, std::span<double> y) const {
    matrix(0).gemv(x, y);
    matvec_count_.bump();
  }

  /// Operator sharing the same K_i with the tensor cut to first-order
  /// coefficient slices (AGS/AJ preconditioners).
  SGOperator restrict_first_order() const { return SGOperator(matrices_, tensor_.first_order()); }

  /// Dense materialization, small instances only (test oracle).
  Eigen::MatrixXd assemble_explicit() const {
    const std::int64_t dim = static_cast<std::int64_t>(n_blocks_) * block_len_;
    if (dim > 20000) throw std::invalid_argument("assemble_explicit: system too large for dense oracle");
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& e : tensor_.entries()) {
      const SparseMatrix& ki = matrix(e.i);
      // apply scatters c * K_i u_j into v_k: row block k, column block j
      const int r0 = e.k * block_len_;
      const int c0 = e.j * block_len_;
      for (int r = 0; r < ki.rows(); ++r)
        for (int p = ki.row_ptr()[static_cast<std::size_t>(r)]; p < ki.row_ptr()[static_cast<std::size_t>(r) + 1]; ++p)
          full(r0 + r, c0 + ki.col_idx()[static_cast<std::size_t>(p)]) +=
              e.value * ki.values()[static_cast<std::size_t>(p)];
    }
    return full;
  }

  /// Block coupling pattern: (j,k) true iff some i has a stored c_ijk.
  std::vector<std::vector<bool>> block_sparsity() const {
    std::vector<std::vector<bool>> pat(static_cast<std::size_t>(n_blocks_),
                                       std::vector<bool>(static_cast<std::size_t>(n_blocks_), false));
    for (const auto& e : tensor_.entries())
      pat[static_cast<std::size_t>(e.j)][static_cast<std::size_t>(e.k)] = true;
    return pat;
  }

 private:
  struct Fiber {
    int i;
    std::vector<std::pair<int, double>> targets;  // (k, c_ijk)
  };

  void build_fibers() {
    fibers_.assign(static_cast<std::size_t>(n_blocks_), {});
    for (const auto& e : tensor_.entries()) {
      auto& fj = fibers_[static_cast<std::size_t>(e.j)];
      auto it = std::find_if(fj.begin(), fj.end(), [&](const Fiber& f) { return f.i == e.i; });
      if (it == fj.end()) {
        fj.push_back({e.i, {}});
        it = std::prev(fj.end());
      }
      it->targets.emplace_back(e.k, e.value);
    }
    n_fibers_ = 0;
    c0kk_.assign(static_cast<std::size_t>(n_blocks_), 0.0);
    for (int j = 0; j < n_blocks_; ++j) {
      auto& fj = fibers_[static_cast<std::size_t>(j)];
      std::sort(fj.begin(), fj.end(), [](const Fiber& a, const Fiber& b) { return a.i < b.i; });
      n_fibers_ += fj.size();
    }
    for (int k = 0; k < n_blocks_; ++k) c0kk_[static_cast<std::size_t>(k)] = tensor_.value(0, k, k);
  }

  void apply_impl(const BlockVector& u, BlockVector& v, bool skip_mean) const {
    if (!u.same_shape(v) || u.n_blocks() != n_blocks_ || u.block_len() != block_len_)
      throw std::invalid_argument("SGOperator::apply: block shape mismatch");
    v.set_zero();
    std::vector<double> y(static_cast<std::size_t>(block_len_));
    for (int j = 0; j < n_blocks_; ++j) {
      const auto uj = u.block(j);
      for (const auto& fiber : fibers_[static_cast<std::size_t>(j)]) {
        if (skip_mean && fiber.i == 0) continue;
        matrix(fiber.i).gemv(uj, y);
        matvec_count_.bump();
        for (const auto& [k, c] : fiber.targets) {
          auto vk = v.block(k);
          for (std::size_t n = 0; n < y.size(); ++n) vk[n] += c * y[n];
        }
      }
    }
  }

  std::shared_ptr<const std::vector<SparseMatrix>> matrices_;
  TripleProductTensor tensor_;
  int n_blocks_ = 0;
  int block_len_ = 0;
  std::vector<std::vector<Fiber>> fibers_;  // grouped by source block j
  std::vector<double> c0kk_;
  std::size_t n_fibers_ = 0;
  detail::RelaxedCounter matvec_count_;
};

}  // namespace sgkit
