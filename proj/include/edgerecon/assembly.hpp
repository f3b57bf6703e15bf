#pragma once

#include <array>
#include <string>
#include <vector>

#include "edgerecon/candidate_edges.hpp"
#include "edgerecon/edge_embedding.hpp"
#include "edgerecon/geometry.hpp"
#include "edgerecon/regressor.hpp"

namespace edgerecon {

struct ScoredEdge {
  CandidateEdge edge;
  double predicted = 0.0;
};

struct TriangleCandidate {
  std::array<Index, 3> vertices{};  // a < b < c
  double max_edge_length = 0.0;
  double perimeter = 0.0;
};

struct AssemblyConfig {
  double d_th = 0.014;
  double length_factor = 1.5;
  std::size_t ring_max = 8;
  // Prune long edges before the distance filter instead of after it.
  bool prune_before_filter = false;

  void validate() const;
};

struct AssemblyDiagnostics {
  std::size_t candidate_edges = 0;
  std::size_t filtered_edges = 0;  // survivors of the distance filter
  std::size_t pruned_edges = 0;    // removed by the length rule
  std::size_t kept_edges = 0;
  std::size_t enumerated_triangles = 0;
  std::size_t accepted_triangles = 0;
  std::size_t boundary_edges = 0;
  std::size_t filled_rings = 0;
  std::size_t unfilled_rings = 0;
  std::size_t fill_triangles = 0;
  std::vector<std::string> messages;

  std::string to_json() const;
};

/// Edges with predicted < d_th, input order kept.
std::vector<CandidateEdge> filter_edges(const std::vector<ScoredEdge>& scored, double d_th);

/// Removes edges longer than factor times the mean input length (one pass).
std::vector<CandidateEdge> prune_long_edges(const std::vector<CandidateEdge>& edges, double factor);

/// Every vertex triple whose three edges are all present, each once.
std::vector<TriangleCandidate> enumerate_triangles(const std::vector<CandidateEdge>& edges);

/// Sort key: (max edge length, perimeter, vertex triple).
bool triangle_order(const TriangleCandidate& a, const TriangleCandidate& b);

/// Greedy ascending acceptance: a triangle is rejected when one of its edges
/// already borders two accepted triangles or its vertex set was accepted.
std::vector<Face> greedy_select(std::vector<TriangleCandidate> tris);

struct HoleFillResult {
  std::vector<Face> added;
  std::size_t boundary_edges = 0;
  std::size_t filled_rings = 0;
  std::size_t unfilled_rings = 0;
};

/// Closes boundary loops of up to ring_max vertices: a 3-loop becomes one
/// triangle, longer loops are fanned from their lowest-index vertex. Loops
/// whose walk is ambiguous, that are too long, or whose fan would break the
/// two-faces-per-edge bound are left open.
HoleFillResult fill_holes(const std::vector<Face>& faces, std::size_t ring_max);

struct ReconstructionResult {
  TriMesh mesh;
  AssemblyDiagnostics diagnostics;
};

/// Runs filtering, pruning, triangle enumeration, greedy selection and hole
/// filling on scored edges. The mesh vertices are the cloud points.
ReconstructionResult assemble(const PointCloud& cloud, const std::vector<ScoredEdge>& scored,
                              const AssemblyConfig& cfg);

struct ReconstructionParams {
  std::size_t k = 32;
  std::size_t n = 50;
  EmbeddingMode mode = EmbeddingMode::kCanonical;
  AssemblyConfig assembly;
};

/// Candidate generation, embedding, prediction and assembly for a cloud in
/// normalized coordinates.
ReconstructionResult reconstruct(const PointCloud& cloud, const RegressorParams& params,
                                 const ReconstructionParams& cfg);

}  // namespace edgerecon
