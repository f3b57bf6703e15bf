#include "edgerecon/candidate_edges.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

namespace edgerecon {

CandidateEdge make_edge(const PointCloud& cloud, Index a, Index b) {
  if (a == b) throw std::invalid_argument("make_edge: self edge");
  if (a > b) std::swap(a, b);
  return CandidateEdge{a, b, (cloud.points[a] - cloud.points[b]).norm()};
}

CandidateEdgeSet generate_candidates(const PointCloud& cloud, const SpatialIndex& index, std::size_t k) {
  const std::size_t n = cloud.size();
  if (k == 0 || k >= n) {
    throw std::invalid_argument("generate_candidates: need 1 <= K < N (K=" + std::to_string(k) +
                                ", N=" + std::to_string(n) + ")");
  }
  if (index.size() != n) throw std::invalid_argument("generate_candidates: index not built over cloud");

  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(n * k);
  for (Index v = 0; v < n; ++v) {
    std::vector<Neighbor> nn = index.knn(cloud.points[v], k + 1);
    auto self = std::find_if(nn.begin(), nn.end(), [v](const Neighbor& x) { return x.index == v; });
    if (self != nn.end()) {
      nn.erase(self);
    } else {
      nn.pop_back();
    }
    for (const Neighbor& x : nn) pairs.emplace_back(std::min(v, x.index), std::max(v, x.index));
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  CandidateEdgeSet set;
  set.k_used = k;
  set.edges.reserve(pairs.size());
  for (const auto& [a, b] : pairs) set.edges.push_back(make_edge(cloud, a, b));
  return set;
}

void write_edges(std::ostream& os, const CandidateEdgeSet& set) {
  os << std::setprecision(17);
  for (const auto& e : set.edges) os << e.i << ' ' << e.j << ' ' << e.length << '\n';
}

}  // namespace edgerecon
