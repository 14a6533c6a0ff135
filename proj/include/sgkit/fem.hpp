#pragma once

// Q1 assembly of the advection-diffusion weak form on the uniform quad mesh:
// 2x2 Gauss per element, coefficient fields interpolated bilinearly from
// nodal values, Dirichlet rows/columns eliminated.

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "sgkit/mesh.hpp"
#include "sgkit/random_field.hpp"
#include "sgkit/sparse.hpp"

namespace sgkit {

namespace detail {

struct QuadPointData {
  std::array<double, 4> shape;  // N_c at the Gauss point
  std::array<double, 4> dx;     // physical x-derivatives
  std::array<double, 4> dy;
};

/// Shape data at the 2x2 Gauss points of the reference square, mapped to an
/// hx-by-hy element (uniform mesh: identical for every element).
inline std::array<QuadPointData, 4> q1_gauss_data(double hx, double hy) {
  constexpr double g = 0.57735026918962576;  // 1/sqrt(3)
  constexpr std::array<std::array<double, 2>, 4> corners{{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}};
  std::array<QuadPointData, 4> out{};
  int q = 0;
  for (double gx : {-g, g})
    for (double gy : {-g, g}) {
      for (int c = 0; c < 4; ++c) {
        const double xc = corners[static_cast<std::size_t>(c)][0];
        const double yc = corners[static_cast<std::size_t>(c)][1];
        out[static_cast<std::size_t>(q)].shape[static_cast<std::size_t>(c)] =
            0.25 * (1 + xc * gx) * (1 + yc * gy);
        out[static_cast<std::size_t>(q)].dx[static_cast<std::size_t>(c)] =
            0.25 * xc * (1 + yc * gy) * 2.0 / hx;
        out[static_cast<std::size_t>(q)].dy[static_cast<std::size_t>(c)] =
            0.25 * yc * (1 + xc * gx) * 2.0 / hy;
      }
      ++q;
    }
  return out;
}

template <class ElementKernel>
SparseMatrix assemble_interior(const Mesh& mesh, ElementKernel&& kernel) {
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(mesh.n_elements()) * 16);
  std::array<std::array<double, 4>, 4> ke{};
  for (int ey = 0; ey < mesh.ny(); ++ey)
    for (int ex = 0; ex < mesh.nx(); ++ex) {
      const auto en = mesh.element_nodes(ex, ey);
      kernel(en, ke);
      for (int r = 0; r < 4; ++r) {
        const int ir = mesh.interior_index(en[static_cast<std::size_t>(r)]);
        if (ir < 0) continue;
        for (int s = 0; s < 4; ++s) {
          const int is = mesh.interior_index(en[static_cast<std::size_t>(s)]);
          if (is < 0) continue;
          trips.push_back({ir, is, ke[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)]});
        }
      }
    }
  return SparseMatrix::from_triplets(mesh.n_interior(), mesh.n_interior(), std::move(trips));
}

}  // namespace detail

/// Stiffness matrix of integral a grad(u) . grad(v) with nodal coefficient a.
inline SparseMatrix assemble_diffusion(const Mesh& mesh, std::span<const double> coeff_field) {
  if (coeff_field.size() != static_cast<std::size_t>(mesh.n_nodes()))
    throw std::invalid_argument("assemble_diffusion: coefficient field must be nodal");
  const auto gp = detail::q1_gauss_data(mesh.hx(), mesh.hy());
  const double detj = mesh.hx() * mesh.hy() / 4.0;
  return detail::assemble_interior(mesh, [&](const std::array<int, 4>& en, auto& ke) {
    for (auto& row : ke) row.fill(0.0);
    for (const auto& q : gp) {
      double a = 0.0;
      for (int c = 0; c < 4; ++c)
        a += q.shape[static_cast<std::size_t>(c)] *
             coeff_field[static_cast<std::size_t>(en[static_cast<std::size_t>(c)])];
      const double w = detj * a;
      for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s)
          ke[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)] +=
              w * (q.dx[static_cast<std::size_t>(r)] * q.dx[static_cast<std::size_t>(s)] +
                   q.dy[static_cast<std::size_t>(r)] * q.dy[static_cast<std::size_t>(s)]);
    }
  });
}

/// Advection matrix of integral (w . grad(u)) v, constant velocity w.
inline SparseMatrix assemble_advection(const Mesh& mesh, std::array<double, 2> w) {
  const auto gp = detail::q1_gauss_data(mesh.hx(), mesh.hy());
  const double detj = mesh.hx() * mesh.hy() / 4.0;
  return detail::assemble_interior(mesh, [&](const std::array<int, 4>&, auto& ke) {
    for (auto& row : ke) row.fill(0.0);
    for (const auto& q : gp)
      for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s)
          ke[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)] +=
              detj * q.shape[static_cast<std::size_t>(r)] *
              (w[0] * q.dx[static_cast<std::size_t>(s)] + w[1] * q.dy[static_cast<std::size_t>(s)]);
  });
}

/// Consistent load vector for constant f over the interior basis functions.
inline std::vector<double> assemble_load(const Mesh& mesh, double f_value) {
  const auto gp = detail::q1_gauss_data(mesh.hx(), mesh.hy());
  const double detj = mesh.hx() * mesh.hy() / 4.0;
  std::vector<double> b(static_cast<std::size_t>(mesh.n_interior()), 0.0);
  for (int ey = 0; ey < mesh.ny(); ++ey)
    for (int ex = 0; ex < mesh.nx(); ++ex) {
      const auto en = mesh.element_nodes(ex, ey);
      for (int r = 0; r < 4; ++r) {
        const int ir = mesh.interior_index(en[static_cast<std::size_t>(r)]);
        if (ir < 0) continue;
        double fe = 0.0;
        for (const auto& q : gp) fe += detj * f_value * q.shape[static_cast<std::size_t>(r)];
        b[static_cast<std::size_t>(ir)] += fe;
      }
    }
  return b;
}

struct KiFamily {
  std::vector<SparseMatrix> matrices;  // K_0 .. K_Phat
  std::vector<double> load;            // deterministic load; stochastic rhs is load * delta_k0
};

/// Chaos coefficients of the stiffness matrix: K_0 carries the advection
/// term plus the mean diffusion block, K_i (i >= 1) are pure diffusion.
inline KiFamily assemble_ki_family(const Mesh& mesh, const FieldExpansion& field,
                                   std::array<double, 2> w) {
  KiFamily out;
  out.matrices.reserve(field.coeffs.size());
  for (std::size_t i = 0; i < field.coeffs.size(); ++i) {
    SparseMatrix d = assemble_diffusion(mesh, field.coeffs[i]);
    if (i == 0) {
      const SparseMatrix adv = assemble_advection(mesh, w);
      std::vector<Triplet> trips;
      trips.reserve(d.nnz() + adv.nnz());
      for (int r = 0; r < d.rows(); ++r) {
        for (int p = d.row_ptr()[static_cast<std::size_t>(r)]; p < d.row_ptr()[static_cast<std::size_t>(r) + 1]; ++p)
          trips.push_back({r, d.col_idx()[static_cast<std::size_t>(p)], d.values()[static_cast<std::size_t>(p)]});
        for (int p = adv.row_ptr()[static_cast<std::size_t>(r)]; p < adv.row_ptr()[static_cast<std::size_t>(r) + 1]; ++p)
          trips.push_back({r, adv.col_idx()[static_cast<std::size_t>(p)], adv.values()[static_cast<std::size_t>(p)]});
      }
      out.matrices.push_back(SparseMatrix::from_triplets(d.rows(), d.cols(), std::move(trips)));
    } else {
      out.matrices.push_back(std::move(d));
    }
  }
  out.load = assemble_load(mesh, 1.0);
  return out;
}

}  // namespace sgkit
