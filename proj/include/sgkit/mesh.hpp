#pragma once

// Uniform structured quadrilateral mesh with homogeneous Dirichlet boundary
// handled by elimination: unknowns are the interior nodes.

#include <array>
#include <stdexcept>
#include <vector>

namespace sgkit {

struct Domain2d {
  double x0 = -0.5, x1 = 0.5, y0 = -0.5, y1 = 0.5;
};

class Mesh {
 public:
  Mesh() = default;
  Mesh(int nx, int ny, Domain2d dom) : nx_(nx), ny_(ny), dom_(dom) {
    hx_ = (dom.x1 - dom.x0) / nx;
    hy_ = (dom.y1 - dom.y0) / ny;
    interior_map_.assign(static_cast<std::size_t>(n_nodes()), -1);
    for (int iy = 1; iy < ny_; ++iy)
      for (int ix = 1; ix < nx_; ++ix) {
        interior_map_[static_cast<std::size_t>(node_id(ix, iy))] =
            static_cast<int>(interior_nodes_.size());
        interior_nodes_.push_back(node_id(ix, iy));
      }
  }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  const Domain2d& domain() const { return dom_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }

  int n_nodes() const { return (nx_ + 1) * (ny_ + 1); }
  int n_elements() const { return nx_ * ny_; }
  int n_interior() const { return static_cast<int>(interior_nodes_.size()); }

  int node_id(int ix, int iy) const { return iy * (nx_ + 1) + ix; }
  double node_x(int node) const { return dom_.x0 + hx_ * (node % (nx_ + 1)); }
  double node_y(int node) const { return dom_.y0 + hy_ * (node / (nx_ + 1)); }

  /// Counter-clockwise corner nodes of element (ex, ey).
  std::array<int, 4> element_nodes(int ex, int ey) const {
    const int n00 = node_id(ex, ey);
    return {n00, n00 + 1, n00 + nx_ + 2, n00 + nx_ + 1};
  }

  bool is_boundary(int node) const {
    return interior_map_[static_cast<std::size_t>(node)] < 0;
  }
  /// Interior index of a node, -1 on the Dirichlet boundary.
  int interior_index(int node) const { return interior_map_[static_cast<std::size_t>(node)]; }
  const std::vector<int>& interior_nodes() const { return interior_nodes_; }

 private:
  int nx_ = 0, ny_ = 0;
  Domain2d dom_;
  double hx_ = 0, hy_ = 0;
  std::vector<int> interior_map_;
  std::vector<int> interior_nodes_;
};

inline Mesh build_mesh(int nx, int ny, Domain2d dom = {}) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("build_mesh: need nx, ny >= 2");
  if (dom.x1 <= dom.x0 || dom.y1 <= dom.y0)
    throw std::invalid_argument("build_mesh: empty domain");
  return Mesh(nx, ny, dom);
}

}  // namespace sgkit
