#pragma once

// Sparse triple-product tensors c_ijk driving the block sparsity of the
// stochastic Galerkin operator. KL mode: c_ijk = E[xi_i psi_j psi_k] with
// xi_i the (unit-variance) expansion variable itself; PCE mode:
// c_ijk = E[psi_i psi_j psi_k] with i ranging over a coefficient basis that
// may have higher order than the solution basis.

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "sgkit/multi_index.hpp"
#include "sgkit/quadrature.hpp"

namespace sgkit {

enum class TensorMode { KL, PCE };

inline const char* tensor_mode_name(TensorMode m) { return m == TensorMode::KL ? "kl" : "pce"; }

class TripleProductTensor {
 public:
  struct Entry {
    int i, j, k;
    double value;
  };

  TripleProductTensor() = default;
  TripleProductTensor(TensorMode mode, int n_coeff, int n_basis, double drop_tol,
                      std::vector<Entry> entries, std::vector<int> coeff_degrees, int dim,
                      int order, PolyFamily family)
      : mode_(mode),
        n_coeff_(n_coeff),
        n_basis_(n_basis),
        drop_tol_(drop_tol),
        entries_(std::move(entries)),
        coeff_degrees_(std::move(coeff_degrees)),
        dim_(dim),
        order_(order),
        family_(family) {
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
      if (a.i != b.i) return a.i < b.i;
      if (a.j != b.j) return a.j < b.j;
      return a.k < b.k;
    });
  }

  TensorMode mode() const { return mode_; }
  int n_coeff() const { return n_coeff_; }    // P_hat + 1
  int n_basis() const { return n_basis_; }    // N_xi + 1
  double drop_tol() const { return drop_tol_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t nnz() const { return entries_.size(); }
  /// Total degree of coefficient index i (0 for the constant slice).
  int coeff_degree(int i) const { return coeff_degrees_[static_cast<std::size_t>(i)]; }

  /// Stored value of c(i,j,k), 0 if dropped.
  double value(int i, int j, int k) const {
    const Entry key{i, j, k, 0.0};
    auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                               [](const Entry& a, const Entry& b) {
                                 if (a.i != b.i) return a.i < b.i;
                                 if (a.j != b.j) return a.j < b.j;
                                 return a.k < b.k;
                               });
    if (it != entries_.end() && it->i == i && it->j == j && it->k == k) return it->value;
    return 0.0;
  }

  /// Tensor restricted to the constant and first-order coefficient slices
  /// (in KL mode every slice is already first order).
  TripleProductTensor first_order() const {
    std::vector<Entry> kept;
    for (const auto& e : entries_)
      if (coeff_degrees_[static_cast<std::size_t>(e.i)] <= 1) kept.push_back(e);
    return TripleProductTensor(mode_, n_coeff_, n_basis_, drop_tol_, std::move(kept),
                               coeff_degrees_, dim_, order_, family_);
  }

  /// One line per nonzero "i j k value", 17 significant digits, after a
  /// "# M p family mode" header.
  void write_text(std::ostream& os) const {
    os << "# " << dim_ << ' ' << order_ << ' ' << family_name(family_) << ' '
       << tensor_mode_name(mode_) << '\n';
    char buf[64];
    for (const auto& e : entries_) {
      std::snprintf(buf, sizeof(buf), "%d %d %d %.17g", e.i, e.j, e.k, e.value);
      os << buf << '\n';
    }
  }

 private:
  TensorMode mode_ = TensorMode::KL;
  int n_coeff_ = 0;
  int n_basis_ = 0;
  double drop_tol_ = 0.0;
  std::vector<Entry> entries_;
  std::vector<int> coeff_degrees_;
  int dim_ = 0;
  int order_ = 0;
  PolyFamily family_ = PolyFamily::Legendre;
};

namespace detail {

/// 1-D table t[a][b][c] = E[p_a p_b p_c] by Gauss quadrature exact for the
/// integrand degree: ceil((3*pmax+1)/2) points.
inline std::vector<double> triple_table_1d(PolyFamily family, int pmax) {
  const int n = (3 * pmax + 2) / 2;
  const GaussRule rule = gauss_rule(family, n);
  const std::size_t m = static_cast<std::size_t>(pmax) + 1;
  std::vector<double> vals(static_cast<std::size_t>(n) * m);
  for (int l = 0; l < n; ++l)
    eval_orthonormal_1d(family, pmax, rule.nodes[static_cast<std::size_t>(l)],
                        std::span<double>(vals.data() + static_cast<std::size_t>(l) * m, m));
  std::vector<double> table(m * m * m, 0.0);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      for (std::size_t c = 0; c < m; ++c) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) {
          const double* p = vals.data() + static_cast<std::size_t>(l) * m;
          s += rule.weights[static_cast<std::size_t>(l)] * p[a] * p[b] * p[c];
        }
        table[(a * m + b) * m + c] = s;
      }
  return table;
}

}  // namespace detail

/// Builds the triple-product tensor over `basis` (solution index j,k) and a
/// coefficient index i in [0, p_hat]. KL mode requires p_hat = M and reads
/// i = 1..M as the expansion variables xi_i (degree-one polynomials). PCE
/// mode takes i from `coeff_basis` (defaults to `basis`), which must share
/// family and dimension; graded ordering makes lower-order bases prefixes of
/// higher-order ones.
inline TripleProductTensor triple_products(const MultiIndexBasis& basis, TensorMode mode,
                                           int p_hat, double drop_tol = 1e-12,
                                           const MultiIndexBasis* coeff_basis = nullptr) {
  MultiIndexBasis kl_coeff;
  const MultiIndexBasis* cb = coeff_basis;
  if (mode == TensorMode::KL) {
    if (p_hat != basis.dim())
      throw std::invalid_argument("triple_products: KL mode requires p_hat = M");
    kl_coeff = build_basis(basis.dim(), 1, basis.family());
    cb = &kl_coeff;
  } else {
    if (cb == nullptr) cb = &basis;
    if (cb->family() != basis.family() || cb->dim() != basis.dim())
      throw std::invalid_argument("triple_products: coefficient basis mismatch");
    if (static_cast<std::size_t>(p_hat) + 1 > cb->size())
      throw std::invalid_argument("triple_products: p_hat exceeds coefficient basis size");
  }

  const int pmax = std::max(basis.order(), cb->order());
  const auto table = detail::triple_table_1d(basis.family(), pmax);
  const std::size_t m = static_cast<std::size_t>(pmax) + 1;
  const int dim = basis.dim();
  const int n = static_cast<int>(basis.size());

  std::vector<TripleProductTensor::Entry> entries;
  for (int i = 0; i <= p_hat; ++i) {
    const auto& ai = cb->index(static_cast<std::size_t>(i)).exponents;
    for (int j = 0; j < n; ++j) {
      const auto& aj = basis.index(static_cast<std::size_t>(j)).exponents;
      for (int k = j; k < n; ++k) {
        const auto& ak = basis.index(static_cast<std::size_t>(k)).exponents;
        double v;
        if (i == 0) {
          // psi_0 = 1: orthonormality makes the constant slice exactly delta_jk
          v = (j == k) ? 1.0 : 0.0;
        } else {
          v = 1.0;
          for (int d = 0; d < dim; ++d) {
            const auto du = static_cast<std::size_t>(d);
            v *= table[(static_cast<std::size_t>(ai[du]) * m + static_cast<std::size_t>(aj[du])) * m +
                       static_cast<std::size_t>(ak[du])];
            if (v == 0.0) break;
          }
        }
        if (std::abs(v) > drop_tol) {
          entries.push_back({i, j, k, v});
          if (k != j) entries.push_back({i, k, j, v});
        }
      }
    }
  }

  std::vector<int> degrees(static_cast<std::size_t>(p_hat) + 1);
  for (int i = 0; i <= p_hat; ++i)
    degrees[static_cast<std::size_t>(i)] = cb->index(static_cast<std::size_t>(i)).total_degree();

  return TripleProductTensor(mode, p_hat + 1, n, drop_tol, std::move(entries), std::move(degrees),
                             basis.dim(), basis.order(), basis.family());
}

}  // namespace sgkit
