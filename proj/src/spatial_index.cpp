#include "edgerecon/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>

namespace edgerecon {

namespace {

constexpr std::uint32_t kLeafSize = 8;

struct Candidate {
  double distance_sq;
  Index index;
  bool operator<(const Candidate& o) const {
    return distance_sq < o.distance_sq || (distance_sq == o.distance_sq && index < o.index);
  }
};

}  // namespace

SpatialIndex::SpatialIndex(std::span<const Point3> points) : points_(points.begin(), points.end()) {
  if (points_.empty()) throw std::invalid_argument("SpatialIndex: empty point set");
  order_.resize(points_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<Index>(i);
  nodes_.reserve(2 * points_.size() / kLeafSize + 2);
  build(0, static_cast<std::uint32_t>(order_.size()));
}

std::uint32_t SpatialIndex::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back(Node{-1, 0.0, begin, end, 0, 0});
  if (end - begin <= kLeafSize) return id;

  Point3 lo = points_[order_[begin]], hi = lo;
  for (std::uint32_t i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis;
  (hi - lo).maxCoeff(&axis);
  if (hi[axis] == lo[axis]) return id;  // all coincident, keep as a leaf

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](Index a, Index b) { return points_[a][axis] < points_[b][axis]; });
  const double split = points_[order_[mid]][axis];

  const std::uint32_t left = build(begin, mid);
  const std::uint32_t right = build(mid, end);
  Node& node = nodes_[id];
  node.axis = axis;
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

std::vector<Neighbor> SpatialIndex::knn(const Point3& query, std::size_t k) const {
  if (k > points_.size()) {
    throw std::invalid_argument("knn: k=" + std::to_string(k) + " exceeds point count " +
                                std::to_string(points_.size()));
  }
  std::vector<Neighbor> out;
  if (k == 0) return out;

  // Max-heap on (distance_sq, index): the top is the current k-th best.
  std::priority_queue<Candidate> heap;
  auto visit = [&](auto&& self, std::uint32_t id) -> void {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const Index idx = order_[i];
        const Candidate c{(points_[idx] - query).squaredNorm(), idx};
        if (heap.size() < k) {
          heap.push(c);
        } else if (c < heap.top()) {
          heap.pop();
          heap.push(c);
        }
      }
      return;
    }
    // Left subtree holds coordinates <= split, right holds >= split.
    const double diff = query[node.axis] - node.split;
    const std::uint32_t near = diff <= 0.0 ? node.left : node.right;
    const std::uint32_t far = diff <= 0.0 ? node.right : node.left;
    self(self, near);
    // Visit on equality: an equal bound may still hide a tie with a smaller index.
    if (heap.size() < k || diff * diff <= heap.top().distance_sq) self(self, far);
  };
  visit(visit, 0);

  out.resize(heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    const Candidate c = heap.top();
    heap.pop();
    out[i] = Neighbor{c.index, std::sqrt(c.distance_sq), c.distance_sq};
  }
  return out;
}

Neighbor SpatialIndex::nearest(const Point3& query) const { return knn(query, 1).front(); }

}  // namespace edgerecon
