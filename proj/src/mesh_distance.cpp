#include "edgerecon/mesh_distance.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace edgerecon {

namespace {

constexpr std::uint32_t kLeafFaces = 4;

double box_distance_sq(const Point3& p, const Point3& lo, const Point3& hi) {
  const Point3 d = (lo - p).cwiseMax(p - hi).cwiseMax(0.0);
  return d.squaredNorm();
}

}  // namespace

double point_segment_distance(const Point3& p, const Point3& a, const Point3& b) {
  const Point3 ab = b - a;
  const double len_sq = ab.squaredNorm();
  if (len_sq == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len_sq, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

// Closest-point region classification (Ericson, Real-Time Collision Detection 5.1.5).
double point_triangle_distance(const Point3& p, const Point3& a, const Point3& b, const Point3& c) {
  const Point3 ab = b - a;
  const Point3 ac = c - a;
  const double scale = std::max({ab.squaredNorm(), ac.squaredNorm(), (c - b).squaredNorm()});
  if (ab.cross(ac).squaredNorm() <= 1e-24 * scale * scale) {
    return std::min({point_segment_distance(p, a, b), point_segment_distance(p, b, c),
                     point_segment_distance(p, c, a)});
  }

  const Point3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return ap.norm();

  const Point3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return bp.norm();

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return (p - (a + v * ab)).norm();
  }

  const Point3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return cp.norm();

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return (p - (a + w * ac)).norm();
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return (p - (b + w * (c - b))).norm();
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  return (p - (a + ab * v + ac * w)).norm();
}

MeshDistance::MeshDistance(const TriMesh& mesh) : vertices_(mesh.vertices) {
  faces_.reserve(mesh.faces.size());
  for (const Face& f : mesh.faces) {
    for (Index v : f) {
      if (v >= vertices_.size()) throw std::out_of_range("MeshDistance: face index out of range");
    }
    if (triangle_area(vertices_[f[0]], vertices_[f[1]], vertices_[f[2]]) <= kDegenerateArea) {
      ++skipped_;
      continue;
    }
    faces_.push_back(f);
  }
  if (skipped_ > 0) {
    std::cerr << "warning: skipping " << skipped_ << " degenerate face(s) in distance queries\n";
  }
  if (faces_.empty()) throw std::invalid_argument("MeshDistance: mesh has no usable faces");
  nodes_.reserve(2 * faces_.size() / kLeafFaces + 2);
  build(0, static_cast<std::uint32_t>(faces_.size()));
}

std::uint32_t MeshDistance::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();

  Point3 lo = Point3::Constant(std::numeric_limits<double>::infinity());
  Point3 hi = -lo;
  Point3 clo = lo, chi = hi;
  for (std::uint32_t f = begin; f < end; ++f) {
    Point3 centroid = Point3::Zero();
    for (Index v : faces_[f]) {
      lo = lo.cwiseMin(vertices_[v]);
      hi = hi.cwiseMax(vertices_[v]);
      centroid += vertices_[v];
    }
    centroid /= 3.0;
    clo = clo.cwiseMin(centroid);
    chi = chi.cwiseMax(centroid);
  }
  nodes_[id].lo = lo;
  nodes_[id].hi = hi;

  int axis;
  const double spread = (chi - clo).maxCoeff(&axis);
  if (end - begin <= kLeafFaces || spread <= 0.0) {
    nodes_[id].first = begin;
    nodes_[id].count = end - begin;
    return id;
  }

  auto centroid_axis = [&](const Face& f) {
    return vertices_[f[0]][axis] + vertices_[f[1]][axis] + vertices_[f[2]][axis];
  };
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(faces_.begin() + begin, faces_.begin() + mid, faces_.begin() + end,
                   [&](const Face& x, const Face& y) { return centroid_axis(x) < centroid_axis(y); });
  const std::uint32_t left = build(begin, mid);
  const std::uint32_t right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

double MeshDistance::face_distance(std::uint32_t f, const Point3& p) const {
  const Face& face = faces_[f];
  return point_triangle_distance(p, vertices_[face[0]], vertices_[face[1]], vertices_[face[2]]);
}

double MeshDistance::operator()(const Point3& p) const {
  double best = std::numeric_limits<double>::infinity();
  double best_sq = best;
  // Boxes are pruned only when clearly farther than the current best, so
  // rounding in the closest-point computation cannot change the minimum.
  auto prunable = [&](const Node& n) {
    return box_distance_sq(p, n.lo, n.hi) > best_sq * (1.0 + 1e-9) + 1e-300;
  };

  std::uint32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (prunable(node)) continue;
    if (node.count > 0) {
      for (std::uint32_t f = node.first; f < node.first + node.count; ++f) {
        const double d = face_distance(f, p);
        if (d < best) {
          best = d;
          best_sq = d * d;
        }
      }
      continue;
    }
    const Node& l = nodes_[node.left];
    const Node& r = nodes_[node.right];
    // Push the nearer child last so it is visited first.
    if (box_distance_sq(p, l.lo, l.hi) < box_distance_sq(p, r.lo, r.hi)) {
      stack[top++] = node.right;
      stack[top++] = node.left;
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  return best;
}

double MeshDistance::brute_force(const Point3& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t f = 0; f < faces_.size(); ++f) best = std::min(best, face_distance(f, p));
  return best;
}

double point_to_mesh_distance(const Point3& p, const TriMesh& mesh) {
  if (mesh.faces.empty()) throw std::invalid_argument("point_to_mesh_distance: mesh has no faces");
  return MeshDistance(mesh)(p);
}

}  // namespace edgerecon
