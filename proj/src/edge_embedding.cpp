#include "edgerecon/edge_embedding.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

#include "edgerecon/errors.hpp"

namespace edgerecon {

namespace {

constexpr double kCollinearTolerance = 1e-9;

Point3 midpoint(const Point3& a, const Point3& b) { return 0.5 * (a + b); }

}  // namespace

const char* to_string(EmbeddingMode mode) {
  return mode == EmbeddingMode::kCanonical ? "canonical" : "translation_only";
}

EmbeddingMode embedding_mode_from_string(const std::string& s) {
  if (s == "canonical") return EmbeddingMode::kCanonical;
  if (s == "translation_only") return EmbeddingMode::kTranslationOnly;
  throw std::invalid_argument("unknown embedding mode '" + s + "'");
}

EdgeNeighborhood edge_neighbors(const SpatialIndex& index, const CandidateEdge& edge,
                                const PointCloud& cloud, std::size_t n) {
  if (n > cloud.size()) {
    throw std::invalid_argument("edge_neighbors: n=" + std::to_string(n) + " exceeds cloud size " +
                                std::to_string(cloud.size()));
  }
  const Point3 center = midpoint(cloud.points[edge.i], cloud.points[edge.j]);
  // Both endpoints sit at exactly half the edge length from the midpoint, but
  // rounding makes their computed distances differ in the last bits, and
  // which one wins changes under rotation. Give them one shared key so the
  // index tie-break orders them. One extra neighbor covers the case where
  // the pair straddles position n.
  const double half_sq = 0.25 * (cloud.points[edge.j] - cloud.points[edge.i]).squaredNorm();
  std::vector<Neighbor> found = index.knn(center, std::min(n + 1, cloud.size()));
  for (Neighbor& nb : found) {
    if (nb.index == edge.i || nb.index == edge.j) nb.distance_sq = half_sq;
  }
  std::stable_sort(found.begin(), found.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.distance_sq != b.distance_sq ? a.distance_sq < b.distance_sq : a.index < b.index;
  });
  found.resize(std::min(n, found.size()));

  EdgeNeighborhood nbh;
  nbh.neighbor_indices.reserve(n);
  for (const Neighbor& nb : found) {
    nbh.neighbor_indices.push_back(nb.index);
    nbh.centroid += cloud.points[nb.index];
  }
  if (n > 0) nbh.centroid /= static_cast<double>(n);
  return nbh;
}

CanonicalFrame canonical_frame(const Point3& source, const Point3& target, const Point3& centroid) {
  const Eigen::Vector3d u = target - source;
  const double u_norm = u.norm();
  if (!(u_norm > 0.0)) throw DegenerateInputError("canonical_frame: edge endpoints coincide");

  CanonicalFrame frame;
  frame.origin = midpoint(source, target);
  frame.x_axis = u / u_norm;

  const Eigen::Vector3d w = centroid - source;
  const Eigen::Vector3d y = u.cross(w);
  const double y_norm = y.norm();
  if (y_norm > kCollinearTolerance * u_norm * w.norm() && y_norm > 0.0) {
    frame.y_axis = y / y_norm;
  } else {
    int axis = 0;
    frame.x_axis.cwiseAbs().minCoeff(&axis);
    frame.y_axis = frame.x_axis.cross(Eigen::Vector3d::Unit(axis)).normalized();
    frame.degenerate = true;
  }
  frame.z_axis = frame.x_axis.cross(frame.y_axis);
  return frame;
}

EdgeEmbedding embed(const PointCloud& cloud, Index source, Index target, const EdgeNeighborhood& nbh,
                    EmbeddingMode mode) {
  const Point3& ps = cloud.points[source];
  const Point3& pt = cloud.points[target];
  EdgeEmbedding emb;
  emb.values.resize(3 * static_cast<Eigen::Index>(nbh.neighbor_indices.size()));

  if (mode == EmbeddingMode::kTranslationOnly) {
    const Point3 center = midpoint(ps, pt);
    for (std::size_t m = 0; m < nbh.neighbor_indices.size(); ++m) {
      emb.values.segment<3>(3 * static_cast<Eigen::Index>(m)) = cloud.points[nbh.neighbor_indices[m]] - center;
    }
    return emb;
  }

  const CanonicalFrame frame = canonical_frame(ps, pt, nbh.centroid);
  for (std::size_t m = 0; m < nbh.neighbor_indices.size(); ++m) {
    emb.values.segment<3>(3 * static_cast<Eigen::Index>(m)) = frame.to_local(cloud.points[nbh.neighbor_indices[m]]);
  }
  return emb;
}

EdgeEmbedding embed(const CandidateEdge& edge, const PointCloud& cloud, const EdgeNeighborhood& nbh,
                    EmbeddingMode mode) {
  return embed(cloud, edge.i, edge.j, nbh, mode);
}

EdgeEmbedding symmetric_embed(const EdgeEmbedding& emb) {
  EdgeEmbedding out = emb;
  for (Eigen::Index k = 0; k + 2 < out.values.size(); k += 3) {
    out.values[k] = -out.values[k];
    out.values[k + 1] = -out.values[k + 1];
  }
  return out;
}

EdgeEmbedder::EdgeEmbedder(const PointCloud& cloud, const SpatialIndex& index, std::size_t n, EmbeddingMode mode)
    : cloud_(cloud), index_(index), n_(n), mode_(mode) {
  if (n > cloud.size()) {
    throw std::invalid_argument("EdgeEmbedder: n=" + std::to_string(n) + " exceeds cloud size " +
                                std::to_string(cloud.size()));
  }
}

EmbeddingPair EdgeEmbedder::oriented(Index source, Index target) const {
  const EdgeNeighborhood nbh = edge_neighbors(index_, make_edge(cloud_, source, target), cloud_, n_);
  EmbeddingPair pair;
  pair.original = embed(cloud_, source, target, nbh, mode_);
  pair.symmetric = mode_ == EmbeddingMode::kCanonical ? symmetric_embed(pair.original) : pair.original;
  return pair;
}

void write_embeddings(std::ostream& os, const std::vector<EdgeEmbedding>& rows) {
  os << std::setprecision(17);
  for (const auto& row : rows) {
    for (Eigen::Index k = 0; k < row.values.size(); ++k) os << (k ? " " : "") << row.values[k];
    os << '\n';
  }
}

}  // namespace edgerecon
