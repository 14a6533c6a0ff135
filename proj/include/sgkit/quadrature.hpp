#pragma once

// 1-D orthonormal polynomial recurrences and Gauss rules for the two
// supported probability measures: uniform on [-1,1] (Legendre) and
// standard Gaussian (probabilists' Hermite).

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace sgkit {

enum class PolyFamily { Legendre, Hermite };

inline const char* family_name(PolyFamily f) {
  return f == PolyFamily::Legendre ? "legendre" : "hermite";
}

/// Three-term recurrence coefficients beta_0..beta_n of the probability
/// measure (both measures are symmetric, so all alpha_k = 0; beta_0 = 1).
inline std::vector<double> recurrence_beta(PolyFamily family, int n) {
  std::vector<double> beta(static_cast<std::size_t>(n) + 1);
  beta[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    beta[static_cast<std::size_t>(k)] =
        family == PolyFamily::Legendre
            ? static_cast<double>(k) * k / ((2.0 * k - 1.0) * (2.0 * k + 1.0))
            : static_cast<double>(k);
  }
  return beta;
}

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;  // sum to 1 (probability measure)
};

/// n-point Gauss rule via Golub-Welsch on the Jacobi matrix.
inline GaussRule gauss_rule(PolyFamily family, int n) {
  if (n < 1) throw std::invalid_argument("gauss_rule: n must be >= 1");
  const auto beta = recurrence_beta(family, n);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n > 1 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(beta[static_cast<std::size_t>(k)]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("gauss_rule: tridiagonal eigensolve failed");
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    rule.nodes[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[static_cast<std::size_t>(i)] = v0 * v0;  // beta_0 = 1
  }
  return rule;
}

/// Evaluates the orthonormal polynomials p_0..p_max_degree at x.
/// out.size() must be max_degree + 1.
inline void eval_orthonormal_1d(PolyFamily family, int max_degree, double x,
                                std::span<double> out) {
  const auto beta = recurrence_beta(family, max_degree + 1);
  out[0] = 1.0;
  if (max_degree >= 1) out[1] = x / std::sqrt(beta[1]);
  for (int k = 1; k < max_degree; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    out[ku + 1] = (x * out[ku] - std::sqrt(beta[ku]) * out[ku - 1]) / std::sqrt(beta[ku + 1]);
  }
}

}  // namespace sgkit
