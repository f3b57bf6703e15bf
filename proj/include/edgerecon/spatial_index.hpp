#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "edgerecon/geometry.hpp"

namespace edgerecon {

struct Neighbor {
  Index index = 0;
  double distance = 0.0;
  double distance_sq = 0.0;
};

// Balanced kd-tree over a fixed point set. Results are identical to a
// brute-force scan: ascending squared distance, ties by smaller index.
class SpatialIndex {
 public:
  explicit SpatialIndex(std::span<const Point3> points);
  explicit SpatialIndex(const std::vector<Point3>& points)
      : SpatialIndex(std::span<const Point3>(points)) {}

  /// The k nearest indexed points to `query`. Throws std::invalid_argument
  /// if k exceeds the point count.
  std::vector<Neighbor> knn(const Point3& query, std::size_t k) const;

  Neighbor nearest(const Point3& query) const;

  std::size_t size() const { return points_.size(); }
  const Point3& point(Index i) const { return points_[i]; }

 private:
  struct Node {
    // Leaf when axis < 0; items [begin, end) of order_.
    int axis = -1;
    double split = 0.0;
    std::uint32_t begin = 0, end = 0;
    std::uint32_t left = 0, right = 0;
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end);

  std::vector<Point3> points_;
  std::vector<Index> order_;
  std::vector<Node> nodes_;
};

}  // namespace edgerecon
