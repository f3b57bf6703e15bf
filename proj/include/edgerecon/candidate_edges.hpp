#pragma once

#include <iosfwd>
#include <vector>

#include "edgerecon/geometry.hpp"
#include "edgerecon/spatial_index.hpp"

namespace edgerecon {

// Undirected edge between two cloud points, stored with i < j.
struct CandidateEdge {
  Index i = 0;
  Index j = 0;
  double length = 0.0;

  friend bool operator==(const CandidateEdge& a, const CandidateEdge& b) {
    return a.i == b.i && a.j == b.j;
  }
};

struct CandidateEdgeSet {
  std::vector<CandidateEdge> edges;  // sorted by (i, j), no duplicates
  std::size_t k_used = 0;
};

/// Connects every point to its K nearest neighbors (itself excluded) and
/// merges the undirected duplicates. Requires 1 <= K < N.
CandidateEdgeSet generate_candidates(const PointCloud& cloud, const SpatialIndex& index, std::size_t k);

CandidateEdge make_edge(const PointCloud& cloud, Index a, Index b);

// Debug dump, one `i j length` line per edge.
void write_edges(std::ostream& os, const CandidateEdgeSet& set);

}  // namespace edgerecon
