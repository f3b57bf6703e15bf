#pragma once

// Reference implementations used only by tests. They are deliberately slow
// and written independently of the library code paths they check.

#include <cstdint>
#include <vector>

#include <edgerecon/assembly.hpp>
#include <edgerecon/geometry.hpp>
#include <edgerecon/random.hpp>
#include <edgerecon/regressor.hpp>
#include <edgerecon/spatial_index.hpp>

namespace oracle {

using edgerecon::Face;
using edgerecon::Index;
using edgerecon::Point3;

std::vector<Point3> random_points(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0);

// Full sort by (squared distance, index).
std::vector<edgerecon::Neighbor> knn(const std::vector<Point3>& pts, const Point3& q, std::size_t k);

// Projection onto the plane, inside test by same-side signs, else nearest
// of the three edges. Segment distances by clamped projection.
double point_triangle(const Point3& p, const Point3& a, const Point3& b, const Point3& c);
double point_mesh(const Point3& p, const edgerecon::TriMesh& mesh);

struct Rigid {
  Eigen::Matrix3d rotation;
  Eigen::Vector3d translation;
  Point3 operator()(const Point3& p) const { return rotation * p + translation; }
};
Rigid random_rigid(edgerecon::Rng& rng, double max_translation = 1.0);

// Nearest-sample brute force over all pairs.
double chamfer_l1(const std::vector<Point3>& a, const std::vector<Point3>& b);
double chamfer_l2(const std::vector<Point3>& a, const std::vector<Point3>& b);
double f_score(const std::vector<Point3>& a, const std::vector<Point3>& b, double tau);
double normal_consistency(const std::vector<Point3>& pa, const std::vector<Eigen::Vector3d>& na,
                          const std::vector<Point3>& pb, const std::vector<Eigen::Vector3d>& nb);

// Replays the sort-then-accept rule with quadratic scans over the accepted
// faces instead of hash maps.
std::vector<Face> greedy_replay(std::vector<edgerecon::TriangleCandidate> tris);

std::size_t max_faces_per_edge(const std::vector<Face>& faces);
bool has_duplicate_faces(const std::vector<Face>& faces);
bool has_repeated_vertex(const std::vector<Face>& faces);

// Distance from the unit-sphere chord sample points to the sphere, maximum
// over t = i / (count - 1).
double sphere_chord_label(const Point3& a, const Point3& b, std::size_t count = 10);

// Every scalar parameter in layer order: f layers then g layers, weight
// (column-major) then bias.
std::vector<double*> parameter_refs(edgerecon::RegressorParams& params);

// Activation pattern of one forward pass: ReLU signs of every hidden unit and
// the max-pool winners. Two passes with equal patterns lie on the same linear
// piece of the network.
std::vector<bool> activation_pattern(const edgerecon::RegressorParams& params, const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& xs);

struct GradientCheck {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped_kinks = 0;  // perturbation crossed a ReLU or max-pool switch
};

// Central differences of the squared-error loss against the library's
// backward(). Relative error is |a - n| / max(|a|, |n|, floor).
GradientCheck gradient_check(const edgerecon::RegressorParams& params, const edgerecon::EdgeEmbedding& emb,
                             const edgerecon::EdgeEmbedding& emb_sym, double target, double h = 1e-4,
                             double floor = 1e-8);

}  // namespace oracle
