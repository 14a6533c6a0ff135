#pragma once

// Input diffusion-field discretizations: truncated 2-D KL expansion (tensor
// products of the separable 1-norm exponential kernel's 1-D eigenpairs) and
// the lognormal field exp(g) projected onto a Hermite chaos basis in closed
// form.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sgkit/covariance.hpp"
#include "sgkit/mesh.hpp"
#include "sgkit/multi_index.hpp"

namespace sgkit {

struct Kl2dTerm {
  double lambda = 0.0;
  int mode_x = 0, mode_y = 0;        // indices into the 1-D pools
  std::vector<double> nodal;         // eigenfunction sampled at mesh nodes
};

/// Truncated 2-D KL expansion; keeps the 1-D pools so eigenfunctions stay
/// evaluable analytically (the Gram oracle needs better than nodal data).
struct KlExpansion2d {
  double mean_value = 0.0;
  std::vector<Kl1dEigenpair> pool_x, pool_y;
  std::vector<Kl2dTerm> terms;  // sorted by descending lambda

  double term_value(std::size_t t, double x, double y) const {
    const auto& tm = terms[t];
    return pool_x[static_cast<std::size_t>(tm.mode_x)].mode.eval(x) *
           pool_y[static_cast<std::size_t>(tm.mode_y)].mode.eval(y);
  }
};

/// Tensor-product 2-D eigenpairs of the separable exponential kernel;
/// lambda_2d = lambda_m lambda_n / sigma^2 so sigma^2 enters once.
inline KlExpansion2d kl_expand_2d(const CovarianceSpec& cov, const Mesh& mesh, int n_terms,
                                  double mean_value) {
  if (n_terms < 1) throw std::invalid_argument("kl_expand_2d: n_terms must be >= 1");
  const int pool = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_terms)))) + 4;
  if (n_terms > pool * pool)
    throw std::invalid_argument("kl_expand_2d: requested terms exceed candidate pool");

  KlExpansion2d kl;
  kl.mean_value = mean_value;
  kl.pool_x = kl_eigenpairs_1d(cov, mesh.domain().x0, mesh.domain().x1, pool);
  kl.pool_y = kl_eigenpairs_1d(cov, mesh.domain().y0, mesh.domain().y1, pool);

  struct Cand {
    double lambda;
    int mx, my;
  };
  std::vector<Cand> cands;
  cands.reserve(static_cast<std::size_t>(pool) * pool);
  const double s2 = cov.sigma * cov.sigma;
  for (int mx = 0; mx < pool; ++mx)
    for (int my = 0; my < pool; ++my)
      cands.push_back({kl.pool_x[static_cast<std::size_t>(mx)].lambda *
                           kl.pool_y[static_cast<std::size_t>(my)].lambda / s2,
                       mx, my});
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.lambda != b.lambda) return a.lambda > b.lambda;
    if (a.mx != b.mx) return a.mx < b.mx;
    return a.my < b.my;
  });

  for (int t = 0; t < n_terms; ++t) {
    Kl2dTerm term;
    term.lambda = cands[static_cast<std::size_t>(t)].lambda;
    term.mode_x = cands[static_cast<std::size_t>(t)].mx;
    term.mode_y = cands[static_cast<std::size_t>(t)].my;
    term.nodal.resize(static_cast<std::size_t>(mesh.n_nodes()));
    const auto& fx = kl.pool_x[static_cast<std::size_t>(term.mode_x)].mode;
    const auto& fy = kl.pool_y[static_cast<std::size_t>(term.mode_y)].mode;
    for (int n = 0; n < mesh.n_nodes(); ++n)
      term.nodal[static_cast<std::size_t>(n)] = fx.eval(mesh.node_x(n)) * fy.eval(mesh.node_y(n));
    kl.terms.push_back(std::move(term));
  }
  return kl;
}

enum class FieldMode { KL, PCE };

/// Nodal coefficient fields a_i(x); coeffs[0] is the mean field. In KL mode
/// coeffs[i] = sqrt(lambda_i) a_i(x) against the unit-variance variables; in
/// PCE mode the index i follows the (Hermite) coefficient basis.
struct FieldExpansion {
  FieldMode mode = FieldMode::KL;
  PolyFamily family = PolyFamily::Legendre;
  int dim = 0;                               // number of driving variables M
  int basis_order = 0;                       // order of the coefficient basis (PCE)
  std::vector<std::vector<double>> coeffs;   // size P_hat + 1, nodal
};

inline FieldExpansion kl_field(const KlExpansion2d& kl, const Mesh& mesh) {
  FieldExpansion f;
  f.mode = FieldMode::KL;
  f.family = PolyFamily::Legendre;
  f.dim = static_cast<int>(kl.terms.size());
  f.basis_order = 1;
  f.coeffs.emplace_back(static_cast<std::size_t>(mesh.n_nodes()), kl.mean_value);
  for (const auto& term : kl.terms) {
    std::vector<double> c(term.nodal.size());
    const double s = std::sqrt(term.lambda);
    for (std::size_t n = 0; n < c.size(); ++n) c[n] = s * term.nodal[n];
    f.coeffs.push_back(std::move(c));
  }
  return f;
}

/// Hermite chaos coefficients of a(x) = exp(g(x)) for Gaussian g given by a
/// KL expansion: a_alpha(x) = exp(g0 + 1/2 sum h_i^2) prod h_i^alpha_i /
/// sqrt(alpha_i!), h_i(x) = sqrt(lambda_i) g_i(x).
inline FieldExpansion lognormal_pce(const KlExpansion2d& gaussian_kl, const MultiIndexBasis& out_basis) {
  if (out_basis.family() != PolyFamily::Hermite)
    throw std::invalid_argument("lognormal_pce: output basis must be Hermite");
  if (out_basis.dim() != static_cast<int>(gaussian_kl.terms.size()))
    throw std::invalid_argument("lognormal_pce: basis dimension must match KL term count");

  const std::size_t n_nodes = gaussian_kl.terms.empty() ? 0 : gaussian_kl.terms[0].nodal.size();
  const int m = out_basis.dim();
  std::vector<std::vector<double>> h(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const auto& term = gaussian_kl.terms[static_cast<std::size_t>(i)];
    h[static_cast<std::size_t>(i)].resize(n_nodes);
    const double s = std::sqrt(term.lambda);
    for (std::size_t n = 0; n < n_nodes; ++n)
      h[static_cast<std::size_t>(i)][n] = s * term.nodal[n];
  }
  std::vector<double> base(n_nodes);
  for (std::size_t n = 0; n < n_nodes; ++n) {
    double q = 0.0;
    for (int i = 0; i < m; ++i) q += h[static_cast<std::size_t>(i)][n] * h[static_cast<std::size_t>(i)][n];
    base[n] = std::exp(gaussian_kl.mean_value + 0.5 * q);
  }

  FieldExpansion f;
  f.mode = FieldMode::PCE;
  f.family = PolyFamily::Hermite;
  f.dim = m;
  f.basis_order = out_basis.order();
  f.coeffs.reserve(out_basis.size());
  for (std::size_t idx = 0; idx < out_basis.size(); ++idx) {
    const auto& alpha = out_basis.index(idx).exponents;
    std::vector<double> c = base;
    for (int i = 0; i < m; ++i) {
      const int ai = alpha[static_cast<std::size_t>(i)];
      if (ai == 0) continue;
      double fact = 1.0;
      for (int q = 2; q <= ai; ++q) fact *= q;
      const double inv_sqrt_fact = 1.0 / std::sqrt(fact);
      for (std::size_t n = 0; n < n_nodes; ++n) {
        double p = 1.0;
        for (int q = 0; q < ai; ++q) p *= h[static_cast<std::size_t>(i)][n];
        c[n] *= p * inv_sqrt_fact;
      }
    }
    f.coeffs.push_back(std::move(c));
  }
  return f;
}

/// Field value at one node for a realization xi of the driving variables
/// (unit-variance: uniform scaled by sqrt(3), or standard normal).
inline double eval_field(const FieldExpansion& f, const MultiIndexBasis* pce_basis,
                         std::span<const double> xi, int node) {
  const auto nu = static_cast<std::size_t>(node);
  if (f.mode == FieldMode::KL) {
    double v = f.coeffs[0][nu];
    for (int i = 0; i < f.dim; ++i) v += f.coeffs[static_cast<std::size_t>(i) + 1][nu] * xi[static_cast<std::size_t>(i)];
    return v;
  }
  const auto psi = pce_basis->eval(xi);
  double v = 0.0;
  for (std::size_t i = 0; i < f.coeffs.size(); ++i) v += f.coeffs[i][nu] * psi[i];
  return v;
}

/// Empirical (min, max) of the truncated field over n_samples random draws
/// of xi at every mesh node; the boundedness surrogate.
inline std::pair<double, double> field_sample_range(const FieldExpansion& f,
                                                    const MultiIndexBasis* pce_basis,
                                                    const Mesh& mesh, int n_samples,
                                                    unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sqrt3 = std::sqrt(3.0);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::vector<double> xi(static_cast<std::size_t>(f.dim));
  for (int s = 0; s < n_samples; ++s) {
    for (int i = 0; i < f.dim; ++i)
      xi[static_cast<std::size_t>(i)] =
          f.family == PolyFamily::Legendre ? sqrt3 * unif(rng) : gauss(rng);
    for (int n = 0; n < mesh.n_nodes(); ++n) {
      const double v = eval_field(f, pce_basis, xi, n);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return {lo, hi};
}

/// CSV dump: node_x, node_y, coeff_0, ..., coeff_Phat.
inline void write_field_csv(const FieldExpansion& f, const Mesh& mesh, std::ostream& os) {
  os << "node_x,node_y";
  for (std::size_t i = 0; i < f.coeffs.size(); ++i) os << ",coeff_" << i;
  os << '\n';
  char buf[64];
  for (int n = 0; n < mesh.n_nodes(); ++n) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g", mesh.node_x(n), mesh.node_y(n));
    os << buf;
    for (const auto& c : f.coeffs) {
      std::snprintf(buf, sizeof(buf), ",%.17g", c[static_cast<std::size_t>(n)]);
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace sgkit
