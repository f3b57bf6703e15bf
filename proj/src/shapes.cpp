#include "edgerecon/shapes.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "edgerecon/mesh_io.hpp"
#include "edgerecon/sampling.hpp"

namespace edgerecon {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Merges vertices with bitwise-equal coordinates.
class Welder {
 public:
  explicit Welder(TriMesh& mesh) : mesh_(mesh) {}

  Index add(const Point3& p) {
    const auto key = std::make_tuple(p.x(), p.y(), p.z());
    auto [it, inserted] = ids_.emplace(key, static_cast<Index>(mesh_.vertices.size()));
    if (inserted) mesh_.vertices.push_back(p);
    return it->second;
  }

 private:
  TriMesh& mesh_;
  std::map<std::tuple<double, double, double>, Index> ids_;
};

std::size_t pow2(int level) { return std::size_t{1} << std::max(0, level); }

}  // namespace

const char* to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::kSphere: return "sphere";
    case ShapeKind::kTorus: return "torus";
    case ShapeKind::kBox: return "box";
    case ShapeKind::kCylinder: return "cylinder";
    case ShapeKind::kFile: return "file";
  }
  return "?";
}

ShapeKind shape_kind_from_string(const std::string& s) {
  if (s == "sphere") return ShapeKind::kSphere;
  if (s == "torus") return ShapeKind::kTorus;
  if (s == "box") return ShapeKind::kBox;
  if (s == "cylinder") return ShapeKind::kCylinder;
  if (s == "file" || ends_with(s, ".obj") || ends_with(s, ".ply") || ends_with(s, ".OBJ") || ends_with(s, ".PLY")) {
    return ShapeKind::kFile;
  }
  throw std::invalid_argument("unknown shape kind '" + s + "'");
}

ShapeSpec ShapeSpec::named(const std::string& name, std::size_t sample_count, std::uint64_t seed) {
  ShapeSpec spec;
  spec.kind = shape_kind_from_string(name);
  if (spec.kind == ShapeKind::kFile && name != "file") spec.path = name;
  spec.sample_count = sample_count;
  spec.seed = seed;
  return spec;
}

void ShapeSpec::validate() const {
  if (sample_count < 4) throw std::invalid_argument("shape: sample_count must be at least 4");
  if (tessellation < 0 || tessellation > 9) throw std::invalid_argument("shape: tessellation must be in [0, 9]");
  switch (kind) {
    case ShapeKind::kSphere:
      if (!(radius > 0)) throw std::invalid_argument("shape: sphere radius must be positive");
      break;
    case ShapeKind::kTorus:
      if (!(minor_radius > 0) || !(major_radius > minor_radius)) {
        throw std::invalid_argument("shape: torus needs major > minor > 0");
      }
      break;
    case ShapeKind::kBox:
      if (!(extents.minCoeff() > 0)) throw std::invalid_argument("shape: box extents must be positive");
      break;
    case ShapeKind::kCylinder:
      if (!(cylinder_radius > 0) || !(cylinder_height > 0)) {
        throw std::invalid_argument("shape: cylinder dimensions must be positive");
      }
      break;
    case ShapeKind::kFile:
      if (path.empty()) throw std::invalid_argument("shape: file kind needs a path");
      break;
  }
}

std::string ShapeSpec::id() const {
  if (kind == ShapeKind::kFile) return path;
  return std::string(to_string(kind)) + "-" + std::to_string(sample_count) + "-s" + std::to_string(seed);
}

TriMesh make_icosphere(double radius, int subdivisions) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriMesh m;
  m.vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : m.vertices) v.normalize();
  m.faces = {{0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
             {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
             {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<Index, Index>, Index> midpoints;
    auto mid = [&](Index a, Index b) {
      const auto key = std::minmax(a, b);
      auto it = midpoints.find(key);
      if (it != midpoints.end()) return it->second;
      const Index id = static_cast<Index>(m.vertices.size());
      m.vertices.push_back((m.vertices[a] + m.vertices[b]).normalized());
      midpoints.emplace(key, id);
      return id;
    };
    std::vector<Face> faces;
    faces.reserve(m.faces.size() * 4);
    for (const Face& f : m.faces) {
      const Index ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      faces.push_back({f[0], ab, ca});
      faces.push_back({f[1], bc, ab});
      faces.push_back({f[2], ca, bc});
      faces.push_back({ab, bc, ca});
    }
    m.faces = std::move(faces);
  }
  for (auto& v : m.vertices) v *= radius;
  return m;
}

TriMesh make_torus(double major_radius, double minor_radius, std::size_t major_segments, std::size_t minor_segments) {
  TriMesh m;
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t i = 0; i < major_segments; ++i) {
    const double u = two_pi * static_cast<double>(i) / static_cast<double>(major_segments);
    for (std::size_t j = 0; j < minor_segments; ++j) {
      const double v = two_pi * static_cast<double>(j) / static_cast<double>(minor_segments);
      const double ring = major_radius + minor_radius * std::cos(v);
      m.vertices.emplace_back(ring * std::cos(u), ring * std::sin(u), minor_radius * std::sin(v));
    }
  }
  auto id = [&](std::size_t i, std::size_t j) {
    return static_cast<Index>((i % major_segments) * minor_segments + (j % minor_segments));
  };
  for (std::size_t i = 0; i < major_segments; ++i) {
    for (std::size_t j = 0; j < minor_segments; ++j) {
      m.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return m;
}

TriMesh make_box(const Point3& extents, std::size_t resolution) {
  TriMesh m;
  Welder weld(m);
  const Point3 half = extents / 2.0;
  const double r = static_cast<double>(resolution);
  auto coord = [&](int axis, std::size_t step) { return -half[axis] + extents[axis] * static_cast<double>(step) / r; };
  for (int axis = 0; axis < 3; ++axis) {
    const int a = (axis + 1) % 3, b = (axis + 2) % 3;
    for (int side = 0; side < 2; ++side) {
      std::vector<Index> grid((resolution + 1) * (resolution + 1));
      for (std::size_t i = 0; i <= resolution; ++i) {
        for (std::size_t j = 0; j <= resolution; ++j) {
          Point3 p;
          p[axis] = side ? half[axis] : -half[axis];
          // Grid ends use the exact half extents so shared edges weld.
          p[a] = i == resolution ? half[a] : coord(a, i);
          p[b] = j == resolution ? half[b] : coord(b, j);
          grid[i * (resolution + 1) + j] = weld.add(p);
        }
      }
      for (std::size_t i = 0; i < resolution; ++i) {
        for (std::size_t j = 0; j < resolution; ++j) {
          const Index v00 = grid[i * (resolution + 1) + j], v10 = grid[(i + 1) * (resolution + 1) + j];
          const Index v01 = grid[i * (resolution + 1) + j + 1], v11 = grid[(i + 1) * (resolution + 1) + j + 1];
          if (side) {
            m.faces.push_back({v00, v10, v11});
            m.faces.push_back({v00, v11, v01});
          } else {
            m.faces.push_back({v00, v11, v10});
            m.faces.push_back({v00, v01, v11});
          }
        }
      }
    }
  }
  return m;
}

TriMesh make_cylinder(double radius, double height, std::size_t segments, std::size_t rows) {
  TriMesh m;
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t r = 0; r <= rows; ++r) {
    const double z = -height / 2.0 + height * static_cast<double>(r) / static_cast<double>(rows);
    for (std::size_t s = 0; s < segments; ++s) {
      const double a = two_pi * static_cast<double>(s) / static_cast<double>(segments);
      m.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), z);
    }
  }
  auto id = [&](std::size_t r, std::size_t s) { return static_cast<Index>(r * segments + s % segments); };
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t s = 0; s < segments; ++s) {
      m.faces.push_back({id(r, s), id(r, s + 1), id(r + 1, s + 1)});
      m.faces.push_back({id(r, s), id(r + 1, s + 1), id(r + 1, s)});
    }
  }
  const Index bottom = static_cast<Index>(m.vertices.size());
  m.vertices.emplace_back(0.0, 0.0, -height / 2.0);
  const Index top = static_cast<Index>(m.vertices.size());
  m.vertices.emplace_back(0.0, 0.0, height / 2.0);
  for (std::size_t s = 0; s < segments; ++s) {
    m.faces.push_back({bottom, id(0, s + 1), id(0, s)});
    m.faces.push_back({top, id(rows, s), id(rows, s + 1)});
  }
  return m;
}

TriMesh shape_mesh(const ShapeSpec& spec) {
  spec.validate();
  const std::size_t res = pow2(spec.tessellation);
  switch (spec.kind) {
    case ShapeKind::kSphere: return make_icosphere(spec.radius, spec.tessellation);
    case ShapeKind::kTorus: return make_torus(spec.major_radius, spec.minor_radius, 4 * res, res);
    case ShapeKind::kBox: return make_box(spec.extents, res);
    case ShapeKind::kCylinder: return make_cylinder(spec.cylinder_radius, spec.cylinder_height, 4 * res, res);
    case ShapeKind::kFile: {
      TriMesh mesh = load_mesh(spec.path);
      check_mesh(mesh);
      return mesh;
    }
  }
  throw std::invalid_argument("shape: unknown kind");
}

ShapeData generate_shape(const ShapeSpec& spec) {
  const TriMesh raw = shape_mesh(spec);
  PointCloud cloud;
  cloud.points = positions(sample_surface(raw, spec.sample_count, spec.seed));
  auto [normalized, record] = normalize_cloud(cloud);
  return ShapeData{transform_mesh(raw, record), std::move(normalized), record};
}

}  // namespace edgerecon
