#pragma once

// The five stochastic preconditioners consumed by GMRES: mean-based,
// Gauss-Seidel mean, approximate Gauss-Seidel (first-order terms, mean
// preconditioner as inner solve), approximate Jacobi (two sweeps), and the
// trace-weighted Kronecker product G (x) K_0. Every apply is a fixed linear
// map: fixed sweep counts from a zero initial guess, no convergence checks.

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "sgkit/block_vector.hpp"
#include "sgkit/mean_solver.hpp"
#include "sgkit/sg_operator.hpp"

namespace sgkit {

/// P = diag{P_0, ..., P_0}: one mean solve per block.
class MeanBasedPrecond final : public BlockOperator {
 public:
  explicit MeanBasedPrecond(const MeanSolver& mean) : mean_(&mean) {}

  void apply(const BlockVector& r, BlockVector& z) const override {
    mean_->solve_blocks(r, z);
  }

 private:
  const MeanSolver* mean_;
};

/// n_outer Gauss-Seidel mean sweeps from a zero guess with exact inner
/// solves; the working right-hand sides update fiber-wise as in the solver.
class GaussSeidelPrecond final : public BlockOperator {
 public:
  GaussSeidelPrecond(const SGOperator& op, const MeanSolver& mean, int n_outer = 1)
      : op_(&op), mean_(&mean), n_outer_(n_outer) {
    if (n_outer < 1) throw std::invalid_argument("GaussSeidelPrecond: n_outer must be >= 1");
  }

  void apply(const BlockVector& r, BlockVector& z) const override {
    BlockVector rhs = r;
    for (int sweep = 0; sweep < n_outer_; ++sweep) {
      for (int k = 0; k < op_->n_blocks(); ++k) {
        mean_->solve(rhs.block(k), z.block(k));
        const double inv = 1.0 / op_->c0kk(k);
        for (auto& v : z.block(k)) v *= inv;
        auto rk = rhs.block(k);
        const auto sk = r.block(k);
        std::copy(sk.begin(), sk.end(), rk.begin());
        op_->gs_source_update(k, z.block(k), rhs, nullptr);
      }
    }
  }

 private:
  const SGOperator* op_;
  const MeanSolver* mean_;
  int n_outer_;
};

/// One Gauss-Seidel sweep on the first-order-restricted operator with the
/// mean preconditioner (here the exact factor) as the diagonal solve.
class ApproxGaussSeidelPrecond final : public BlockOperator {
 public:
  ApproxGaussSeidelPrecond(const SGOperator& op, const MeanSolver& p0)
      : first_order_(op.restrict_first_order()), inner_(first_order_, p0, 1) {}

  void apply(const BlockVector& r, BlockVector& z) const override { inner_.apply(r, z); }

  const SGOperator& first_order_operator() const { return first_order_; }

 private:
  SGOperator first_order_;
  GaussSeidelPrecond inner_;
};

/// Exactly two Jacobi mean sweeps from a zero guess on the first-order
/// operator; the first sweep coincides with the mean-based apply.
class ApproxJacobiPrecond final : public BlockOperator {
 public:
  ApproxJacobiPrecond(const SGOperator& op, const MeanSolver& p0)
      : first_order_(op.restrict_first_order()), p0_(&p0) {}

  void apply(const BlockVector& r, BlockVector& z) const override {
    BlockVector u1(r.n_blocks(), r.block_len());
    first_sweep(r, u1);
    BlockVector rhs(r.n_blocks(), r.block_len());
    first_order_.apply_higher(u1, rhs);
    rhs.scale(-1.0);
    rhs.axpy(1.0, r);
    first_sweep(rhs, z);
  }

  /// Intermediate first-sweep output (the mean-based apply), exposed for
  /// verification.
  void first_sweep(const BlockVector& r, BlockVector& z) const {
    for (int k = 0; k < first_order_.n_blocks(); ++k) {
      p0_->solve(r.block(k), z.block(k));
      const double inv = 1.0 / first_order_.c0kk(k);
      for (auto& v : z.block(k)) v *= inv;
    }
  }

  const SGOperator& first_order_operator() const { return first_order_; }

 private:
  SGOperator first_order_;
  const MeanSolver* p0_;
};

/// P_1 = G (x) K_0 with G(j,k) = sum_i w_i c_ijk, w_i = tr(K_i^T K_0) /
/// tr(K_0^T K_0); applying the inverse is one mean solve per block followed
/// by a dense G^{-1} contraction across the stochastic index.
class KroneckerPrecond final : public BlockOperator {
 public:
  KroneckerPrecond(const SGOperator& op, const MeanSolver& mean)
      : mean_(&mean), n_blocks_(op.n_blocks()), block_len_(op.block_len()) {
    const SparseMatrix& k0 = op.matrix(0);
    const double t00 = k0.frobenius_dot(k0);
    std::vector<double> w(static_cast<std::size_t>(op.tensor().n_coeff()));
    for (int i = 0; i < op.tensor().n_coeff(); ++i)
      w[static_cast<std::size_t>(i)] = op.matrix(i).frobenius_dot(k0) / t00;
    weights_ = w;
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n_blocks_, n_blocks_);
    for (const auto& e : op.tensor().entries())
      g(e.j, e.k) += w[static_cast<std::size_t>(e.i)] * e.value;
    g_ = g;
    lu_.compute(g);
    const double gmax = g.cwiseAbs().maxCoeff();
    const double umin = lu_.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(umin > 1e-14 * gmax)) throw std::runtime_error("KroneckerPrecond: G is singular");
  }

  const Eigen::MatrixXd& g_matrix() const { return g_; }
  const std::vector<double>& trace_weights() const { return weights_; }

  void apply(const BlockVector& r, BlockVector& z) const override {
    mean_->solve_blocks(r, z);
    // contract G^{-1} across blocks: rows of the block-major layout
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<RowMat> y(z.data(), n_blocks_, block_len_);
    y = lu_.solve(y).eval();
  }

 private:
  const MeanSolver* mean_;
  int n_blocks_, block_len_;
  std::vector<double> weights_;
  Eigen::MatrixXd g_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

}  // namespace sgkit
