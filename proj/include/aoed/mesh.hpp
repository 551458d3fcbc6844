#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

namespace aoed {

using Vector = Eigen::VectorXd;

enum class BoundaryMarker : std::uint8_t {
  Interior = 0,
  DirichletTop,
  DirichletBottom,
  Neumann,
  Well,
};

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool contains(const Eigen::Vector2d& p, double tol = 1e-12) const {
    return p.x() >= x0 - tol && p.x() <= x1 + tol && p.y() >= y0 - tol &&
           p.y() <= y1 + tol;
  }
};

// Structured triangulation of a rectangle: uniform grid, each cell split along
// the (i,j)->(i+1,j+1) diagonal. Node ordering is i + j*(nx+1). Immutable
// after construction and safe to share across threads.
struct Mesh {
  int nx = 0, ny = 0;
  Rect box;
  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::array<int, 3>> tris;
  std::vector<BoundaryMarker> marker;  // per node
  std::vector<double> tri_area;
  std::vector<std::array<Eigen::Vector2d, 3>> tri_grad;  // P1 basis gradients

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_tris() const { return static_cast<int>(tris.size()); }
  int node_index(int i, int j) const { return i + j * (nx + 1); }

  bool is_dirichlet(int node) const {
    BoundaryMarker m = marker[node];
    return m == BoundaryMarker::DirichletTop ||
           m == BoundaryMarker::DirichletBottom || m == BoundaryMarker::Well;
  }

  int nearest_node(const Eigen::Vector2d& p) const;

  // Value at the centroid of triangle t of the P1 interpolant of nodal field v.
  double centroid_value(const Vector& v, int t) const {
    const auto& T = tris[t];
    return (v[T[0]] + v[T[1]] + v[T[2]]) / 3.0;
  }

  Eigen::Vector2d centroid(int t) const {
    const auto& T = tris[t];
    return (nodes[T[0]] + nodes[T[1]] + nodes[T[2]]) / 3.0;
  }

  // Constant gradient on triangle t of the P1 interpolant of v.
  Eigen::Vector2d grad_on_tri(const Vector& v, int t) const {
    const auto& T = tris[t];
    const auto& g = tri_grad[t];
    return v[T[0]] * g[0] + v[T[1]] * g[1] + v[T[2]] * g[2];
  }
};

// Builds the mesh with the default marker convention of a flow cell driven by
// a top/bottom pressure difference: top and bottom rows Dirichlet, lateral
// sides Neumann (corners belong to the Dirichlet rows).
// Throws std::invalid_argument for zero cell counts.
Mesh build_rect_mesh(int nx, int ny, const Rect& box = Rect{});

// Re-marks boundary nodes for the production-well setup: all boundary is
// Neumann except nodes within radius r_well of each corner, which become
// Dirichlet well boundaries.
void mark_well_corners(Mesh& mesh, double r_well);

// Nodal interpolation of an analytic function.
template <typename F>
Vector interpolate(const Mesh& mesh, F&& f) {
  Vector v(mesh.n_nodes());
  for (int i = 0; i < mesh.n_nodes(); ++i) v[i] = f(mesh.nodes[i]);
  return v;
}

}  // namespace aoed
