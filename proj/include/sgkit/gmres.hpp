#pragma once

// Restarted GMRES over block vectors with right preconditioning, modified
// Gram-Schmidt plus one reorthogonalization pass. Right preconditioning keeps
// the recurrence residual equal to the true residual, so histories are
// comparable across preconditioners.

#include <chrono>
#include <cmath>
#include <vector>

#include "sgkit/block_vector.hpp"
#include "sgkit/report.hpp"

namespace sgkit {

struct GmresOptions {
  double tol = 1e-12;
  int max_iter = 2000;
  int restart = 100;
};

inline SolveReport gmres(const BlockOperator& op, const BlockVector& b, BlockVector& x,
                         const GmresOptions& opts = {}, const BlockOperator* precond = nullptr) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport report;
  x = BlockVector(b.n_blocks(), b.block_len());
  const double bn = b.norm2();
  if (bn == 0.0) {
    report.converged = true;
    report.residual_history = {0.0};
    return report;
  }
  report.residual_history.push_back(1.0);

  const int m = opts.restart;
  std::vector<BlockVector> basis;
  std::vector<double> hess(static_cast<std::size_t>(m + 1) * m, 0.0);  // column-major
  std::vector<double> cs(static_cast<std::size_t>(m)), sn(static_cast<std::size_t>(m));
  std::vector<double> g(static_cast<std::size_t>(m) + 1);
  BlockVector r(b.n_blocks(), b.block_len());
  BlockVector w(b.n_blocks(), b.block_len());
  BlockVector z(b.n_blocks(), b.block_len());
  auto h = [&](int i, int j) -> double& { return hess[static_cast<std::size_t>(j) * (m + 1) + i]; };

  while (report.iterations < opts.max_iter) {
    // true residual at (re)start
    if (report.iterations == 0) {
      r = b;
    } else {
      op.apply(x, r);
      r.scale(-1.0);
      r.axpy(1.0, b);
    }
    const double beta = r.norm2();
    if (beta / bn <= opts.tol) {
      report.converged = true;
      break;
    }
    basis.clear();
    basis.push_back(r);
    basis.back().scale(1.0 / beta);
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;

    int k = 0;
    bool cycle_done = false;
    for (; k < m && report.iterations < opts.max_iter && !cycle_done; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      if (precond) {
        precond->apply(basis[ku], z);
        op.apply(z, w);
      } else {
        op.apply(basis[ku], w);
      }
      // modified Gram-Schmidt with one reorthogonalization pass
      for (int i = 0; i <= k; ++i) {
        const double hik = basis[static_cast<std::size_t>(i)].dot(w);
        h(i, k) = hik;
        w.axpy(-hik, basis[static_cast<std::size_t>(i)]);
      }
      for (int i = 0; i <= k; ++i) {
        const double corr = basis[static_cast<std::size_t>(i)].dot(w);
        h(i, k) += corr;
        w.axpy(-corr, basis[static_cast<std::size_t>(i)]);
      }
      h(k + 1, k) = w.norm2();

      for (int i = 0; i < k; ++i) {
        const double t = cs[static_cast<std::size_t>(i)] * h(i, k) + sn[static_cast<std::size_t>(i)] * h(i + 1, k);
        h(i + 1, k) = -sn[static_cast<std::size_t>(i)] * h(i, k) + cs[static_cast<std::size_t>(i)] * h(i + 1, k);
        h(i, k) = t;
      }
      const double denom = std::hypot(h(k, k), h(k + 1, k));
      cs[ku] = h(k, k) / denom;
      sn[ku] = h(k + 1, k) / denom;
      h(k, k) = denom;
      g[ku + 1] = -sn[ku] * g[ku];
      g[ku] *= cs[ku];

      ++report.iterations;
      const double relres = std::abs(g[ku + 1]) / bn;
      report.residual_history.push_back(relres);

      if (h(k + 1, k) <= 1e-14 * bn) {
        report.breakdown = true;
        cycle_done = true;
      } else if (relres <= opts.tol) {
        cycle_done = true;
      } else {
        basis.push_back(w);
        basis.back().scale(1.0 / h(k + 1, k));
      }
    }

    // back-substitute y and update x += M^{-1} (V y)
    const int kk = k;
    std::vector<double> y(static_cast<std::size_t>(kk));
    for (int i = kk - 1; i >= 0; --i) {
      double s = g[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < kk; ++j) s -= h(i, j) * y[static_cast<std::size_t>(j)];
      y[static_cast<std::size_t>(i)] = s / h(i, i);
    }
    w.set_zero();
    for (int i = 0; i < kk; ++i) w.axpy(y[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(i)]);
    if (precond) {
      precond->apply(w, z);
      x.axpy(1.0, z);
    } else {
      x.axpy(1.0, w);
    }

    if (std::abs(g[static_cast<std::size_t>(kk)]) / bn <= opts.tol) {
      report.converged = true;
      break;
    }
    if (report.breakdown) break;
  }

  report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace sgkit
