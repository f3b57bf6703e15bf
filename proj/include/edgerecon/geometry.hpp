#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace edgerecon {

using Point3 = Eigen::Vector3d;
using Index = std::uint32_t;
using Face = std::array<Index, 3>;

// Maps a point into normalized space as (p - center) * scale.
struct NormalizationRecord {
  Point3 center = Point3::Zero();
  double scale = 1.0;

  Point3 apply(const Point3& p) const { return (p - center) * scale; }
  Point3 invert(const Point3& q) const { return q / scale + center; }
  bool is_identity() const { return scale == 1.0 && center.isZero(0.0); }
};

struct PointCloud {
  std::vector<Point3> points;
  NormalizationRecord normalization;

  std::size_t size() const { return points.size(); }
  const Point3& operator[](std::size_t i) const { return points[i]; }
};

struct TriMesh {
  std::vector<Point3> vertices;
  std::vector<Face> faces;

  bool empty() const { return faces.empty(); }
};

/// Translates the bounding-box center to the origin and scales the longest
/// side to 1. The returned record maps original to normalized coordinates.
/// Throws DegenerateInputError if the cloud is empty or all points coincide.
std::pair<PointCloud, NormalizationRecord> normalize_cloud(const PointCloud& cloud);

/// Applies `record` to every vertex of `mesh`.
TriMesh transform_mesh(const TriMesh& mesh, const NormalizationRecord& record);

/// Checks the invariants a reconstruction input must satisfy: at least four
/// points, finite coordinates, no two identical points.
void check_cloud(const PointCloud& cloud);

/// Checks face indices and repeated face vertices. Zero-area faces are
/// tolerated here; distance queries skip them.
void check_mesh(const TriMesh& mesh);

std::size_t count_degenerate_faces(const TriMesh& mesh);

double triangle_area(const Point3& a, const Point3& b, const Point3& c);

// Faces with area at or below this are treated as degenerate.
inline constexpr double kDegenerateArea = 1e-12;

}  // namespace edgerecon
