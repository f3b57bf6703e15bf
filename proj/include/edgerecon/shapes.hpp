#pragma once

#include <cstdint>
#include <string>

#include "edgerecon/geometry.hpp"

namespace edgerecon {

enum class ShapeKind { kSphere, kTorus, kBox, kCylinder, kFile };

const char* to_string(ShapeKind kind);
// Accepts the kind names; anything ending in .obj or .ply is taken as a file.
ShapeKind shape_kind_from_string(const std::string& s);

struct ShapeSpec {
  ShapeKind kind = ShapeKind::kSphere;
  double radius = 1.0;        // sphere
  double major_radius = 2.0;  // torus
  double minor_radius = 0.5;
  Point3 extents{1.0, 1.0, 1.0};  // box side lengths
  double cylinder_radius = 0.5;
  double cylinder_height = 1.5;
  // Subdivision level; resolution roughly doubles per level.
  int tessellation = 5;
  std::string path;  // kFile
  std::size_t sample_count = 500;
  std::uint64_t seed = 0;

  // Parses "sphere", "torus", ... or a mesh path.
  static ShapeSpec named(const std::string& name, std::size_t sample_count, std::uint64_t seed);
  void validate() const;
  std::string id() const;
};

struct ShapeData {
  TriMesh gt;        // normalized with the cloud's record
  PointCloud cloud;  // normalized; `normalization` maps back to the raw shape
  NormalizationRecord record;
};

// Analytic meshes in their own coordinates, centered at the origin.
TriMesh make_icosphere(double radius, int subdivisions);
TriMesh make_torus(double major_radius, double minor_radius, std::size_t major_segments, std::size_t minor_segments);
TriMesh make_box(const Point3& extents, std::size_t resolution);
TriMesh make_cylinder(double radius, double height, std::size_t segments, std::size_t rows);

TriMesh shape_mesh(const ShapeSpec& spec);

// Samples the cloud from the shape mesh, then normalizes both with the
// cloud's record.
ShapeData generate_shape(const ShapeSpec& spec);

}  // namespace edgerecon
