#include "edgerecon/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "edgerecon/errors.hpp"
#include "edgerecon/random.hpp"

namespace edgerecon {

std::vector<SurfaceSample> sample_surface(const TriMesh& mesh, std::size_t count, std::uint64_t seed) {
  check_mesh(mesh);
  std::vector<double> cumulative;
  cumulative.reserve(mesh.faces.size());
  double total = 0.0;
  for (const Face& f : mesh.faces) {
    const double area = triangle_area(mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]);
    total += area > kDegenerateArea ? area : 0.0;
    cumulative.push_back(total);
  }
  if (!(total > 0.0)) throw DegenerateInputError("sample_surface: mesh has zero total area");

  Rng rng(seed);
  std::vector<SurfaceSample> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    const double r = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
    if (it == cumulative.end()) --it;
    const Face& f = mesh.faces[static_cast<std::size_t>(it - cumulative.begin())];
    const Point3& a = mesh.vertices[f[0]];
    const Point3& b = mesh.vertices[f[1]];
    const Point3& c = mesh.vertices[f[2]];

    const double su = std::sqrt(rng.uniform());
    const double v = rng.uniform();
    SurfaceSample sample;
    sample.position = (1.0 - su) * a + su * (1.0 - v) * b + su * v * c;
    sample.normal = (b - a).cross(c - a).normalized();
    out.push_back(sample);
  }
  return out;
}

std::vector<Point3> positions(const std::vector<SurfaceSample>& samples) {
  std::vector<Point3> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.position);
  return out;
}

}  // namespace edgerecon
