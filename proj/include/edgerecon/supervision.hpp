#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edgerecon/candidate_edges.hpp"
#include "edgerecon/edge_embedding.hpp"
#include "edgerecon/geometry.hpp"
#include "edgerecon/mesh_distance.hpp"

namespace edgerecon {

inline constexpr std::size_t kEdgeSamples = 10;

/// `count` equally spaced points from source to target, both endpoints
/// included. Throws std::invalid_argument for count < 2.
std::vector<Point3> sample_edge_points(const Point3& source, const Point3& target,
                                       std::size_t count = kEdgeSamples);

/// Largest distance from the sampled edge points to the reference surface.
double edge_to_surface_distance(const CandidateEdge& edge, const PointCloud& cloud, const MeshDistance& gt);
double edge_to_surface_distance(const CandidateEdge& edge, const PointCloud& cloud, const TriMesh& gt);

struct LabeledEdge {
  CandidateEdge edge;
  EdgeEmbedding embedding;
  EdgeEmbedding embedding_sym;
  double label = 0.0;
};

struct TrainingSetSource {
  std::string shape_id;
  std::uint64_t seed = 0;
  std::size_t points = 0;
  std::size_t k = 0;
  std::size_t n = 0;
  EmbeddingMode mode = EmbeddingMode::kCanonical;
};

struct TrainingSet {
  std::vector<LabeledEdge> samples;
  TrainingSetSource source;

  std::size_t dimension() const {
    return samples.empty() ? 3 * source.n : static_cast<std::size_t>(samples.front().embedding.size());
  }
};

/// One labeled sample per candidate edge of `cloud`. The cloud and `gt` must
/// share a coordinate frame. `source.k`, `source.n` and `source.mode` select
/// the candidate and embedding parameters; the rest is carried as metadata.
TrainingSet build_training_set(const PointCloud& cloud, const TriMesh& gt, TrainingSetSource source);

/// Seeded uniform subset without replacement, order preserved.
TrainingSet subsample(const TrainingSet& set, std::size_t max_samples, std::uint64_t seed);

/// Concatenates sets with equal dimension and embedding mode. The merged
/// source keeps the first set's parameters and joins the shape ids.
TrainingSet merge(const std::vector<TrainingSet>& sets);

// Binary little-endian record file: header (N, K, n, seed, mode, shape id)
// then per sample i, j, 3n + 3n embedding reals and the label.
void write_training_set(const TrainingSet& set, const std::string& path);
TrainingSet read_training_set(const std::string& path);

}  // namespace edgerecon
