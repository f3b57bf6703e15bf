#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "edgerecon/candidate_edges.hpp"
#include "edgerecon/geometry.hpp"
#include "edgerecon/spatial_index.hpp"

namespace edgerecon {

enum class EmbeddingMode {
  kCanonical,        // neighbor coordinates in the edge's local frame
  kTranslationOnly,  // raw coordinates relative to the edge midpoint (ablation)
};

const char* to_string(EmbeddingMode mode);
EmbeddingMode embedding_mode_from_string(const std::string& s);

// Orthonormal right-handed frame centered on an edge midpoint.
struct CanonicalFrame {
  Point3 origin;
  Eigen::Vector3d x_axis, y_axis, z_axis;
  // The neighborhood centroid was collinear with the edge and y was picked
  // from the coordinate axis least aligned with x.
  bool degenerate = false;

  Eigen::Vector3d to_local(const Point3& q) const {
    const Eigen::Vector3d d = q - origin;
    return {d.dot(x_axis), d.dot(y_axis), d.dot(z_axis)};
  }
};

// The n points nearest to the edge midpoint, ascending distance, ties by index.
struct EdgeNeighborhood {
  std::vector<Index> neighbor_indices;
  Point3 centroid = Point3::Zero();
};

// Flattened local coordinates (x0, y0, z0, x1, ...) of the neighborhood.
struct EdgeEmbedding {
  Eigen::VectorXd values;

  Eigen::Index size() const { return values.size(); }
};

struct EmbeddingPair {
  EdgeEmbedding original;
  EdgeEmbedding symmetric;
};

/// Throws std::invalid_argument if n exceeds the cloud size.
EdgeNeighborhood edge_neighbors(const SpatialIndex& index, const CandidateEdge& edge,
                                const PointCloud& cloud, std::size_t n);

/// Frame with origin at the midpoint of (source, target), x toward target,
/// y = (target - source) x (centroid - source) normalized, z = x cross y.
/// Throws DegenerateInputError when source == target.
CanonicalFrame canonical_frame(const Point3& source, const Point3& target, const Point3& centroid);

/// Embedding of the edge oriented source -> target.
EdgeEmbedding embed(const PointCloud& cloud, Index source, Index target, const EdgeNeighborhood& nbh,
                    EmbeddingMode mode = EmbeddingMode::kCanonical);

/// Embedding of the edge oriented i -> j.
EdgeEmbedding embed(const CandidateEdge& edge, const PointCloud& cloud, const EdgeNeighborhood& nbh,
                    EmbeddingMode mode = EmbeddingMode::kCanonical);

/// Negates the x and y component of every local point; the result equals
/// the embedding of the reversed edge.
EdgeEmbedding symmetric_embed(const EdgeEmbedding& emb);

// Computes embedding pairs for edges of one cloud.
class EdgeEmbedder {
 public:
  EdgeEmbedder(const PointCloud& cloud, const SpatialIndex& index, std::size_t n,
               EmbeddingMode mode = EmbeddingMode::kCanonical);

  EmbeddingPair operator()(const CandidateEdge& edge) const { return oriented(edge.i, edge.j); }

  // In translation-only mode the embedding does not depend on orientation,
  // so both members of the pair are identical.
  EmbeddingPair oriented(Index source, Index target) const;

  std::size_t neighbors() const { return n_; }
  EmbeddingMode mode() const { return mode_; }
  std::size_t dimension() const { return 3 * n_; }

 private:
  const PointCloud& cloud_;
  const SpatialIndex& index_;
  std::size_t n_;
  EmbeddingMode mode_;
};

// Debug dump, one row of 3n reals per embedding.
void write_embeddings(std::ostream& os, const std::vector<EdgeEmbedding>& rows);

}  // namespace edgerecon
