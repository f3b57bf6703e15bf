#include "edgerecon/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>

#include "edgerecon/errors.hpp"

namespace edgerecon {

std::pair<PointCloud, NormalizationRecord> normalize_cloud(const PointCloud& cloud) {
  if (cloud.points.empty()) throw DegenerateInputError("normalize_cloud: empty cloud");
  Point3 lo = cloud.points.front(), hi = lo;
  for (const Point3& p : cloud.points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double extent = (hi - lo).maxCoeff();
  if (!(extent > 0.0) || !std::isfinite(extent)) {
    throw DegenerateInputError("normalize_cloud: bounding box has no positive extent");
  }

  NormalizationRecord record;
  record.center = 0.5 * (lo + hi);
  record.scale = 1.0 / extent;

  PointCloud out;
  out.points.reserve(cloud.points.size());
  for (const Point3& p : cloud.points) out.points.push_back(record.apply(p));
  // Compose with whatever was applied before.
  out.normalization.center = cloud.normalization.center + record.center / cloud.normalization.scale;
  out.normalization.scale = cloud.normalization.scale * record.scale;
  return {std::move(out), record};
}

TriMesh transform_mesh(const TriMesh& mesh, const NormalizationRecord& record) {
  TriMesh out;
  out.faces = mesh.faces;
  out.vertices.reserve(mesh.vertices.size());
  for (const Point3& v : mesh.vertices) out.vertices.push_back(record.apply(v));
  return out;
}

void check_cloud(const PointCloud& cloud) {
  if (cloud.size() < 4) {
    throw DegenerateInputError("point cloud needs at least 4 points, got " +
                               std::to_string(cloud.size()));
  }
  std::vector<Index> order(cloud.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (!cloud.points[i].allFinite()) {
      throw DegenerateInputError("point " + std::to_string(i) + " has a non-finite coordinate");
    }
    order[i] = static_cast<Index>(i);
  }
  auto lex = [&](Index a, Index b) {
    const Point3& p = cloud.points[a];
    const Point3& q = cloud.points[b];
    return std::tie(p.x(), p.y(), p.z()) < std::tie(q.x(), q.y(), q.z());
  };
  std::sort(order.begin(), order.end(), lex);
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (cloud.points[order[i]] == cloud.points[order[i - 1]]) {
      throw DegenerateInputError("points " + std::to_string(order[i - 1]) + " and " +
                                 std::to_string(order[i]) + " are identical");
    }
  }
}

void check_mesh(const TriMesh& mesh) {
  const std::size_t nv = mesh.vertices.size();
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& face = mesh.faces[f];
    for (Index v : face) {
      if (v >= nv) {
        throw std::out_of_range("face " + std::to_string(f) + " references vertex " +
                                std::to_string(v) + " of " + std::to_string(nv));
      }
    }
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
      throw DegenerateInputError("face " + std::to_string(f) + " repeats a vertex");
    }
  }
}

double triangle_area(const Point3& a, const Point3& b, const Point3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

std::size_t count_degenerate_faces(const TriMesh& mesh) {
  return static_cast<std::size_t>(std::count_if(mesh.faces.begin(), mesh.faces.end(), [&](const Face& f) {
    return triangle_area(mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]) <= kDegenerateArea;
  }));
}

}  // namespace edgerecon
