#pragma once

#include <string>
#include <utility>

#include "aoed/mesh.hpp"

namespace aoed {

// Legacy ASCII VTK writers. Fields are written as POINT_DATA scalars with
// full double precision so outputs are byte-reproducible.
void write_vtk_fields(
    const std::string& path, const Mesh& mesh,
    const std::vector<std::pair<std::string, Vector>>& fields);

// Sensor locations as VTK polydata vertices with per-point scalar data
// (design weights overlay).
void write_vtk_points(
    const std::string& path, const std::vector<Eigen::Vector2d>& points,
    const std::vector<std::pair<std::string, Vector>>& fields);

}  // namespace aoed
