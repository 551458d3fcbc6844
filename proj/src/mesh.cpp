#include "aoed/mesh.hpp"

#include <limits>
#include <stdexcept>

namespace aoed {

namespace {

void triangle_geometry(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                       const Eigen::Vector2d& c, double& area,
                       std::array<Eigen::Vector2d, 3>& grad) {
  const Eigen::Vector2d e1 = b - a;
  const Eigen::Vector2d e2 = c - a;
  const double det = e1.x() * e2.y() - e1.y() * e2.x();
  area = 0.5 * det;
  // grad(lambda_k) = perpendicular of opposite edge / (2*area)
  grad[0] = Eigen::Vector2d(b.y() - c.y(), c.x() - b.x()) / det;
  grad[1] = Eigen::Vector2d(c.y() - a.y(), a.x() - c.x()) / det;
  grad[2] = Eigen::Vector2d(a.y() - b.y(), b.x() - a.x()) / det;
}

}  // namespace

Mesh build_rect_mesh(int nx, int ny, const Rect& box) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("build_rect_mesh: cell counts must be >= 1");
  if (box.width() <= 0.0 || box.height() <= 0.0)
    throw std::invalid_argument("build_rect_mesh: degenerate domain rectangle");

  Mesh mesh;
  mesh.nx = nx;
  mesh.ny = ny;
  mesh.box = box;
  mesh.nodes.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  const double dx = box.width() / nx;
  const double dy = box.height() / ny;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.nodes.emplace_back(box.x0 + i * dx, box.y0 + j * dy);

  mesh.tris.reserve(2 * static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = mesh.node_index(i, j);
      const int v10 = mesh.node_index(i + 1, j);
      const int v01 = mesh.node_index(i, j + 1);
      const int v11 = mesh.node_index(i + 1, j + 1);
      mesh.tris.push_back({v00, v10, v11});
      mesh.tris.push_back({v00, v11, v01});
    }
  }

  mesh.tri_area.resize(mesh.n_tris());
  mesh.tri_grad.resize(mesh.n_tris());
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const auto& T = mesh.tris[t];
    triangle_geometry(mesh.nodes[T[0]], mesh.nodes[T[1]], mesh.nodes[T[2]],
                      mesh.tri_area[t], mesh.tri_grad[t]);
  }

  mesh.marker.assign(mesh.n_nodes(), BoundaryMarker::Interior);
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const int n = mesh.node_index(i, j);
      if (j == ny)
        mesh.marker[n] = BoundaryMarker::DirichletTop;
      else if (j == 0)
        mesh.marker[n] = BoundaryMarker::DirichletBottom;
      else if (i == 0 || i == nx)
        mesh.marker[n] = BoundaryMarker::Neumann;
    }
  }
  return mesh;
}

void mark_well_corners(Mesh& mesh, double r_well) {
  if (r_well <= 0.0) throw std::invalid_argument("mark_well_corners: r_well must be positive");
  const Rect& b = mesh.box;
  const Eigen::Vector2d corners[4] = {
      {b.x0, b.y0}, {b.x1, b.y0}, {b.x0, b.y1}, {b.x1, b.y1}};
  for (int j = 0; j <= mesh.ny; ++j) {
    for (int i = 0; i <= mesh.nx; ++i) {
      const int n = mesh.node_index(i, j);
      const bool on_boundary = (i == 0 || i == mesh.nx || j == 0 || j == mesh.ny);
      if (!on_boundary) continue;
      mesh.marker[n] = BoundaryMarker::Neumann;
      for (const auto& c : corners) {
        if ((mesh.nodes[n] - c).norm() <= r_well) {
          mesh.marker[n] = BoundaryMarker::Well;
          break;
        }
      }
    }
  }
}

int Mesh::nearest_node(const Eigen::Vector2d& p) const {
  int best = 0;
  double best_d = std::numeric_limits<double>::max();
  for (int i = 0; i < n_nodes(); ++i) {
    const double d = (nodes[i] - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace aoed
