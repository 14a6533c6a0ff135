#pragma once

// Total-order multivariate polynomial chaos bases over M independent
// variables, graded lexicographic ordering (index 0 is the constant).

#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgkit/quadrature.hpp"

namespace sgkit {

struct MultiIndex {
  std::vector<int> exponents;

  int total_degree() const {
    return std::accumulate(exponents.begin(), exponents.end(), 0);
  }
  bool operator==(const MultiIndex&) const = default;
};

/// Number of multi-indices with |alpha| <= order in dim variables,
/// i.e. binomial(dim + order, order). Throws on 64-bit overflow.
inline std::uint64_t basis_size(int dim, int order) {
  if (dim < 1 || order < 0) throw std::invalid_argument("basis_size: need dim >= 1, order >= 0");
  std::uint64_t result = 1;
  for (int i = 1; i <= order; ++i) {
    const auto num = static_cast<std::uint64_t>(dim + i);
    if (result > UINT64_MAX / num)
      throw std::overflow_error("basis_size: binomial(" + std::to_string(dim + order) + "," +
                                std::to_string(order) + ") overflows 64 bits");
    result = result * num / static_cast<std::uint64_t>(i);
  }
  return result;
}

class MultiIndexBasis {
 public:
  MultiIndexBasis() = default;
  MultiIndexBasis(int dim, int order, PolyFamily family, std::vector<MultiIndex> indices)
      : dim_(dim), order_(order), family_(family), indices_(std::move(indices)) {}

  int dim() const { return dim_; }
  int order() const { return order_; }
  PolyFamily family() const { return family_; }
  std::size_t size() const { return indices_.size(); }
  const MultiIndex& index(std::size_t i) const { return indices_[i]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }

  /// Values [psi_0(point), ..., psi_{N}(point)]; each psi is the product of
  /// per-dimension orthonormal 1-D polynomials.
  std::vector<double> eval(std::span<const double> point) const {
    if (point.size() != static_cast<std::size_t>(dim_))
      throw std::invalid_argument("MultiIndexBasis::eval: point dimension mismatch");
    // per-dimension tables of 1-D values up to the basis order
    std::vector<double> table(static_cast<std::size_t>(dim_) * (order_ + 1));
    for (int d = 0; d < dim_; ++d) {
      eval_orthonormal_1d(family_, order_, point[static_cast<std::size_t>(d)],
                          std::span<double>(table.data() + static_cast<std::size_t>(d) * (order_ + 1),
                                            static_cast<std::size_t>(order_) + 1));
    }
    std::vector<double> out(indices_.size());
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      double v = 1.0;
      const auto& ex = indices_[i].exponents;
      for (int d = 0; d < dim_; ++d)
        v *= table[static_cast<std::size_t>(d) * (order_ + 1) + static_cast<std::size_t>(ex[static_cast<std::size_t>(d)])];
      out[i] = v;
    }
    return out;
  }

 private:
  int dim_ = 0;
  int order_ = 0;
  PolyFamily family_ = PolyFamily::Legendre;
  std::vector<MultiIndex> indices_;
};

namespace detail {
inline void compositions_desc(int total, int parts, std::vector<int>& prefix,
                              std::vector<MultiIndex>& out) {
  if (parts == 1) {
    prefix.push_back(total);
    out.push_back(MultiIndex{prefix});
    prefix.pop_back();
    return;
  }
  for (int first = total; first >= 0; --first) {
    prefix.push_back(first);
    compositions_desc(total - first, parts - 1, prefix, out);
    prefix.pop_back();
  }
}
}  // namespace detail

/// Graded lexicographic total-order basis: degrees ascending, and within a
/// degree the leading exponents descending, so the M degree-one indices come
/// out as e_1, e_2, ..., e_M.
inline MultiIndexBasis build_basis(int dim, int order, PolyFamily family) {
  const std::uint64_t count = basis_size(dim, order);
  if (count > (std::uint64_t{1} << 31))
    throw std::overflow_error("build_basis: basis size " + std::to_string(count) + " too large");
  std::vector<MultiIndex> indices;
  indices.reserve(static_cast<std::size_t>(count));
  std::vector<int> prefix;
  for (int d = 0; d <= order; ++d) detail::compositions_desc(d, dim, prefix, indices);
  return MultiIndexBasis(dim, order, family, std::move(indices));
}

}  // namespace sgkit
