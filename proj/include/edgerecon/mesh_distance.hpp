#pragma once

#include <cstdint>
#include <vector>

#include "edgerecon/geometry.hpp"

namespace edgerecon {

/// Unsigned Euclidean distance from `p` to the closed triangle (a, b, c).
/// Degenerate triangles fall back to the nearest of the three edge segments.
double point_triangle_distance(const Point3& p, const Point3& a, const Point3& b, const Point3& c);

double point_segment_distance(const Point3& p, const Point3& a, const Point3& b);

// Unsigned distance queries against a triangle mesh through an AABB
// hierarchy. Zero-area faces are skipped (a warning is printed once at
// construction). Queries return exactly the brute-force minimum.
class MeshDistance {
 public:
  explicit MeshDistance(const TriMesh& mesh);

  double operator()(const Point3& p) const;

  // Reference path over the same face set, kept for verification.
  double brute_force(const Point3& p) const;

  std::size_t face_count() const { return faces_.size(); }
  std::size_t skipped_faces() const { return skipped_; }

 private:
  struct Node {
    Point3 lo, hi;
    // Leaf when count > 0: faces [first, first + count) of faces_.
    std::uint32_t first = 0, count = 0;
    std::uint32_t left = 0, right = 0;
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end);
  double face_distance(std::uint32_t f, const Point3& p) const;

  std::vector<Point3> vertices_;
  std::vector<Face> faces_;
  std::vector<Node> nodes_;
  std::size_t skipped_ = 0;
};

/// Convenience wrapper that builds a MeshDistance per call. Throws
/// std::invalid_argument for a mesh without usable faces.
double point_to_mesh_distance(const Point3& p, const TriMesh& mesh);

}  // namespace edgerecon
