#pragma once

#include <cstdint>
#include <vector>

#include "edgerecon/geometry.hpp"

namespace edgerecon {

struct SurfaceSample {
  Point3 position;
  Eigen::Vector3d normal;  // unit normal of the source triangle
};

/// Area-weighted uniform samples on the mesh surface. Deterministic for a
/// given seed. Throws DegenerateInputError when the total area is zero.
std::vector<SurfaceSample> sample_surface(const TriMesh& mesh, std::size_t count, std::uint64_t seed);

std::vector<Point3> positions(const std::vector<SurfaceSample>& samples);

}  // namespace edgerecon
