#include "aoed/vtk_io.hpp"

#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace aoed {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << std::setprecision(17);
  return out;
}

}  // namespace

void write_vtk_fields(
    const std::string& path, const Mesh& mesh,
    const std::vector<std::pair<std::string, Vector>>& fields) {
  std::ofstream out = open_out(path);
  out << "# vtk DataFile Version 3.0\n";
  out << "aoed field output\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.n_nodes() << " double\n";
  for (const auto& p : mesh.nodes) out << p.x() << " " << p.y() << " 0\n";
  out << "CELLS " << mesh.n_tris() << " " << 4 * mesh.n_tris() << "\n";
  for (const auto& T : mesh.tris)
    out << "3 " << T[0] << " " << T[1] << " " << T[2] << "\n";
  out << "CELL_TYPES " << mesh.n_tris() << "\n";
  for (int t = 0; t < mesh.n_tris(); ++t) out << "5\n";
  out << "POINT_DATA " << mesh.n_nodes() << "\n";
  for (const auto& [name, v] : fields) {
    if (v.size() != mesh.n_nodes())
      throw std::invalid_argument("write_vtk_fields: field '" + name +
                                  "' does not match mesh");
    out << "SCALARS " << name << " double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (Eigen::Index i = 0; i < v.size(); ++i) out << v[i] << "\n";
  }
}

void write_vtk_points(
    const std::string& path, const std::vector<Eigen::Vector2d>& points,
    const std::vector<std::pair<std::string, Vector>>& fields) {
  std::ofstream out = open_out(path);
  const int n = static_cast<int>(points.size());
  out << "# vtk DataFile Version 3.0\n";
  out << "aoed point output\n";
  out << "ASCII\n";
  out << "DATASET POLYDATA\n";
  out << "POINTS " << n << " double\n";
  for (const auto& p : points) out << p.x() << " " << p.y() << " 0\n";
  out << "VERTICES " << n << " " << 2 * n << "\n";
  for (int i = 0; i < n; ++i) out << "1 " << i << "\n";
  out << "POINT_DATA " << n << "\n";
  for (const auto& [name, v] : fields) {
    if (v.size() != n)
      throw std::invalid_argument("write_vtk_points: field '" + name +
                                  "' does not match point count");
    out << "SCALARS " << name << " double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (Eigen::Index i = 0; i < v.size(); ++i) out << v[i] << "\n";
  }
}

}  // namespace aoed
