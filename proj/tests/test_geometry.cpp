#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include <edgerecon/errors.hpp>
#include <edgerecon/geometry.hpp>
#include <edgerecon/mesh_distance.hpp>
#include <edgerecon/random.hpp>
#include <edgerecon/sampling.hpp>
#include <edgerecon/shapes.hpp>
#include <edgerecon/spatial_index.hpp>

#include "oracles.hpp"

using namespace edgerecon;
using Catch::Matchers::WithinAbs;

namespace {

PointCloud cloud_of(std::vector<Point3> pts) {
  PointCloud c;
  c.points = std::move(pts);
  return c;
}

TriMesh random_mesh(std::size_t faces, std::uint64_t seed) {
  Rng rng(seed);
  TriMesh m;
  for (std::size_t f = 0; f < faces; ++f) {
    const Point3 base(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const auto id = static_cast<Index>(m.vertices.size());
    for (int k = 0; k < 3; ++k) {
      m.vertices.push_back(base + Point3(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)));
    }
    m.faces.push_back({id, id + 1, id + 2});
  }
  return m;
}

}  // namespace

TEST_CASE("normalize_cloud maps the bounding box into the unit cube") {
  std::vector<Point3> corners;
  for (int i = 0; i < 8; ++i) corners.emplace_back(2.0 * (i & 1), 2.0 * ((i >> 1) & 1), 2.0 * ((i >> 2) & 1));
  auto [norm, rec] = normalize_cloud(cloud_of(corners));
  CHECK(rec.scale == 0.5);
  for (const Point3& p : norm.points) {
    for (int a = 0; a < 3; ++a) CHECK(std::abs(p[a]) == 0.5);
  }
}

TEST_CASE("normalize_cloud is idempotent on a normalized cloud") {
  auto [once, r1] = normalize_cloud(cloud_of(oracle::random_points(100, 3)));
  auto [twice, r2] = normalize_cloud(once);
  CHECK_THAT(r2.scale, WithinAbs(1.0, 1e-12));
  CHECK(r2.center.norm() < 1e-12);
  for (std::size_t i = 0; i < once.size(); ++i) CHECK((once[i] - twice[i]).norm() < 1e-12);
}

TEST_CASE("normalization record inverts") {
  const auto pts = oracle::random_points(100, 11, -7.0, 13.0);
  auto [norm, rec] = normalize_cloud(cloud_of(pts));
  double span = 0.0;
  for (int a = 0; a < 3; ++a) {
    double lo = INFINITY, hi = -INFINITY;
    for (const Point3& p : norm.points) {
      lo = std::min(lo, p[a]);
      hi = std::max(hi, p[a]);
    }
    CHECK_THAT(lo + hi, WithinAbs(0.0, 1e-12));
    span = std::max(span, hi - lo);
  }
  CHECK_THAT(span, WithinAbs(1.0, 1e-12));
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK((rec.invert(norm[i]) - pts[i]).norm() < 1e-9);
}

TEST_CASE("normalize_cloud rejects coincident clouds") {
  CHECK_THROWS_AS(normalize_cloud(cloud_of({Point3(1, 1, 1), Point3(1, 1, 1)})), DegenerateInputError);
  CHECK_THROWS_AS(normalize_cloud(PointCloud{}), DegenerateInputError);
}

TEST_CASE("check_cloud rejects unusable input") {
  CHECK_THROWS_AS(check_cloud(cloud_of({Point3(0, 0, 0), Point3(1, 0, 0), Point3(0, 1, 0)})), DegenerateInputError);
  CHECK_THROWS_AS(check_cloud(cloud_of({Point3(0, 0, 0), Point3(1, 0, 0), Point3(0, 1, 0), Point3(1, 0, 0)})),
                  DegenerateInputError);
  CHECK_THROWS_AS(check_cloud(cloud_of({Point3(0, 0, 0), Point3(1, 0, 0), Point3(0, 1, 0), Point3(NAN, 0, 0)})),
                  DegenerateInputError);
  CHECK_NOTHROW(check_cloud(cloud_of(oracle::random_points(10, 1))));
}

TEST_CASE("check_mesh validates indices") {
  TriMesh m{{Point3(0, 0, 0), Point3(1, 0, 0), Point3(0, 1, 0)}, {{0, 1, 3}}};
  CHECK_THROWS(check_mesh(m));
  m.faces = {{0, 1, 1}};
  CHECK_THROWS(check_mesh(m));
  m.faces = {{0, 1, 2}};
  CHECK_NOTHROW(check_mesh(m));
}

TEST_CASE("knn on tiny inputs") {
  SECTION("single point") {
    const SpatialIndex index(std::vector<Point3>{Point3(0.3, 0.2, 0.1)});
    const auto r = index.knn(Point3(5, 5, 5), 1);
    REQUIRE(r.size() == 1);
    CHECK(r[0].index == 0);
  }
  SECTION("collinear points") {
    const SpatialIndex index(std::vector<Point3>{Point3(0, 0, 0), Point3(1, 0, 0), Point3(2, 0, 0)});
    const auto r = index.knn(Point3(0, 0, 0), 2);
    REQUIRE(r.size() == 2);
    CHECK(r[0].index == 0);
    CHECK(r[1].index == 1);
    CHECK(r[0].distance == 0.0);
    CHECK(r[1].distance == 1.0);
  }
  SECTION("ties go to the lower index") {
    const SpatialIndex index(std::vector<Point3>{Point3(0, 0, 0), Point3(0, 1, 0), Point3(1, 0, 0), Point3(-1, 0, 0)});
    const auto r = index.knn(Point3(0, 0, 0), 4);
    CHECK(r[1].index == 1);
    CHECK(r[2].index == 2);
    CHECK(r[3].index == 3);
  }
  SECTION("cube corners from the center") {
    std::vector<Point3> corners;
    for (int i = 0; i < 8; ++i) corners.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
    const SpatialIndex index(corners);
    const auto r = index.knn(Point3(0.5, 0.5, 0.5), 8);
    REQUIRE(r.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(r[i].index == i);
      CHECK(r[i].distance == r[0].distance);
    }
  }
  SECTION("k larger than the cloud") {
    const SpatialIndex index(oracle::random_points(5, 2));
    CHECK_THROWS_AS(index.knn(Point3::Zero(), 6), std::invalid_argument);
  }
  SECTION("empty cloud") { CHECK_THROWS(SpatialIndex(std::vector<Point3>{})); }
}

TEST_CASE("knn matches brute force") {
  struct Case {
    std::size_t n, k, queries;
  };
  for (const Case c : {Case{1000, 5, 50}, Case{500, 32, 20}, Case{2000, 1, 100}, Case{64, 64, 10}}) {
    const auto pts = oracle::random_points(c.n, c.n + c.k);
    const SpatialIndex index(pts);
    const auto queries = oracle::random_points(c.queries, 99, -1.2, 1.2);
    for (const Point3& q : queries) {
      const auto got = index.knn(q, c.k);
      const auto want = oracle::knn(pts, q, c.k);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].index == want[i].index);
        CHECK(got[i].distance_sq == want[i].distance_sq);
      }
    }
  }
}

TEST_CASE("knn with many exact ties matches brute force") {
  // Integer lattice: lots of equal distances.
  std::vector<Point3> pts;
  for (int x = 0; x < 6; ++x) {
    for (int y = 0; y < 6; ++y) {
      for (int z = 0; z < 6; ++z) pts.emplace_back(x, y, z);
    }
  }
  const SpatialIndex index(pts);
  for (const Point3& q : {Point3(2.5, 2.5, 2.5), Point3(0, 0, 0), Point3(3, 2, 1), Point3(2.5, 3, 0)}) {
    const auto got = index.knn(q, 27);
    const auto want = oracle::knn(pts, q, 27);
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i].index == want[i].index);
  }
}

TEST_CASE("point_triangle_distance basics") {
  const Point3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0);
  CHECK(point_triangle_distance(a, a, b, c) == 0.0);
  const Point3 centroid = (a + b + c) / 3.0;
  CHECK_THAT(point_triangle_distance(centroid + Point3(0, 0, 0.37), a, b, c), WithinAbs(0.37, 1e-15));
  CHECK_THAT(point_triangle_distance(Point3(2, 0, 0), a, b, c), WithinAbs(1.0, 1e-15));
  CHECK_THAT(point_triangle_distance(Point3(0.5, -1, 0), a, b, c), WithinAbs(1.0, 1e-15));
}

TEST_CASE("point_triangle_distance against dense barycentric sampling") {
  Rng rng(5);
  // 10^6 samples over the triangle is a grid with ~1414 steps per side.
  const int steps = 1414;
  for (int trial = 0; trial < 100; ++trial) {
    const Point3 a(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Point3 b(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Point3 c(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Point3 p(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
    double best = INFINITY;
    for (int i = 0; i <= steps; ++i) {
      for (int j = 0; i + j <= steps; ++j) {
        const double u = double(i) / steps, v = double(j) / steps;
        best = std::min(best, (a + u * (b - a) + v * (c - a) - p).squaredNorm());
      }
    }
    best = std::sqrt(best);
    const double d = point_triangle_distance(p, a, b, c);
    CHECK(d <= best + 1e-12);
    CHECK(best - d < 1e-4 * std::max(1.0, (b - a).norm() + (c - a).norm()));
    CHECK_THAT(d, WithinAbs(oracle::point_triangle(p, a, b, c), 1e-12));
  }
}

TEST_CASE("point_triangle_distance is rigid invariant") {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pts = oracle::random_points(4, 1000 + trial);
    const auto T = oracle::random_rigid(rng, 5.0);
    const double d0 = point_triangle_distance(pts[0], pts[1], pts[2], pts[3]);
    const double d1 = point_triangle_distance(T(pts[0]), T(pts[1]), T(pts[2]), T(pts[3]));
    CHECK_THAT(d1, WithinAbs(d0, 1e-9));
  }
}

TEST_CASE("point_triangle_distance on a degenerate triangle uses the segments") {
  const Point3 a(0, 0, 0), b(1, 0, 0), c(2, 0, 0);
  CHECK_THAT(point_triangle_distance(Point3(1.5, 1, 0), a, b, c), WithinAbs(1.0, 1e-15));
  CHECK_THAT(point_triangle_distance(Point3(3, 0, 0), a, b, c), WithinAbs(1.0, 1e-15));
  CHECK_THAT(point_triangle_distance(Point3(1, 1, 1), a, a, a), WithinAbs(std::sqrt(3.0), 1e-15));
}

TEST_CASE("mesh distance matches brute force over faces") {
  const TriMesh mesh = random_mesh(200, 21);
  const MeshDistance dist(mesh);
  for (const Point3& p : oracle::random_points(50, 22, -1.5, 1.5)) {
    const double want = oracle::point_mesh(p, mesh);
    CHECK(dist(p) == dist.brute_force(p));
    CHECK_THAT(dist(p), WithinAbs(want, 1e-12));
  }
}

TEST_CASE("mesh distance of surface samples is zero") {
  const TriMesh mesh = random_mesh(200, 23);
  const MeshDistance dist(mesh);
  for (const auto& s : sample_surface(mesh, 500, 4)) CHECK(dist(s.position) < 1e-9);
}

TEST_CASE("distance from the center of a unit icosphere") {
  const TriMesh sphere = make_icosphere(1.0, 5);
  const double d = point_to_mesh_distance(Point3::Zero(), sphere);
  // The closest points are face centroids, inside the sphere by the sagitta.
  CHECK(d <= 1.0);
  CHECK(d > 1.0 - 1e-3);
}

TEST_CASE("degenerate faces are skipped") {
  TriMesh m{{Point3(0, 0, 0), Point3(1, 0, 0), Point3(0, 1, 0), Point3(5, 5, 5), Point3(6, 6, 6), Point3(7, 7, 7)},
            {{0, 1, 2}, {3, 4, 5}}};
  const MeshDistance dist(m);
  CHECK(dist.skipped_faces() == 1);
  CHECK_THAT(dist(Point3(6, 6, 6)), WithinAbs(oracle::point_triangle(Point3(6, 6, 6), m.vertices[0], m.vertices[1],
                                                                      m.vertices[2]),
                                              1e-12));
  CHECK_THROWS(point_to_mesh_distance(Point3::Zero(), TriMesh{}));
}

TEST_CASE("sample_surface on one triangle") {
  TriMesh m{{Point3(0, 0, 0), Point3(2, 0, 0), Point3(0, 2, 0)}, {{0, 1, 2}}};
  const auto s = sample_surface(m, 3, 7);
  REQUIRE(s.size() == 3);
  for (const auto& x : s) {
    CHECK(x.position.z() == 0.0);
    CHECK(x.position.x() >= 0.0);
    CHECK(x.position.y() >= 0.0);
    CHECK(x.position.x() + x.position.y() <= 2.0 + 1e-12);
    CHECK(std::abs(x.normal.z()) == 1.0);
  }
}

TEST_CASE("sample_surface follows face areas") {
  // Areas 9 : 1.
  TriMesh m{{Point3(0, 0, 0), Point3(3, 0, 0), Point3(0, 6, 0), Point3(10, 0, 0), Point3(11, 0, 0), Point3(10, 2, 0)},
            {{0, 1, 2}, {3, 4, 5}}};
  const auto s = sample_surface(m, 100000, 9);
  std::size_t big = 0;
  for (const auto& x : s) big += x.position.x() < 5.0;
  const double ratio = double(big) / double(s.size() - big);
  CHECK_THAT(ratio, WithinAbs(9.0, 0.09));
}

TEST_CASE("sample_surface is deterministic and rejects zero area") {
  const TriMesh mesh = random_mesh(20, 1);
  const auto a = sample_surface(mesh, 100, 42), b = sample_surface(mesh, 100, 42);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].position == b[i].position);
  TriMesh flat{{Point3(0, 0, 0), Point3(1, 0, 0), Point3(2, 0, 0)}, {{0, 1, 2}}};
  CHECK_THROWS_AS(sample_surface(flat, 10, 1), DegenerateInputError);
}

TEST_CASE("rng draws are reproducible") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.uniform() == b.uniform());
    CHECK(a.index(7) == b.index(7));
  }
  Rng c(1);
  for (int i = 0; i < 1000; ++i) {
    const auto k = c.index(5);
    CHECK(k < 5);
  }
}
