#include "edgerecon/supervision.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "edgerecon/binary_io.hpp"
#include "edgerecon/random.hpp"
#include "edgerecon/spatial_index.hpp"

namespace edgerecon {

namespace {

constexpr char kMagic[] = "ERTS";
constexpr std::uint32_t kVersion = 1;

}  // namespace

std::vector<Point3> sample_edge_points(const Point3& source, const Point3& target, std::size_t count) {
  if (count < 2) throw std::invalid_argument("sample_edge_points: count must be >= 2");
  std::vector<Point3> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    out.push_back((1.0 - t) * source + t * target);
  }
  return out;
}

double edge_to_surface_distance(const CandidateEdge& edge, const PointCloud& cloud, const MeshDistance& gt) {
  double worst = 0.0;
  for (const Point3& p : sample_edge_points(cloud.points[edge.i], cloud.points[edge.j])) {
    worst = std::max(worst, gt(p));
  }
  return worst;
}

double edge_to_surface_distance(const CandidateEdge& edge, const PointCloud& cloud, const TriMesh& gt) {
  return edge_to_surface_distance(edge, cloud, MeshDistance(gt));
}

TrainingSet build_training_set(const PointCloud& cloud, const TriMesh& gt, TrainingSetSource source) {
  const SpatialIndex index(cloud.points);
  const CandidateEdgeSet candidates = generate_candidates(cloud, index, source.k);
  const EdgeEmbedder embedder(cloud, index, source.n, source.mode);
  const MeshDistance distance(gt);

  TrainingSet set;
  source.points = cloud.size();
  set.source = std::move(source);
  set.samples.reserve(candidates.edges.size());
  for (const CandidateEdge& edge : candidates.edges) {
    EmbeddingPair pair = embedder(edge);
    set.samples.push_back(LabeledEdge{edge, std::move(pair.original), std::move(pair.symmetric),
                                      edge_to_surface_distance(edge, cloud, distance)});
  }
  return set;
}

TrainingSet subsample(const TrainingSet& set, std::size_t max_samples, std::uint64_t seed) {
  if (set.samples.size() <= max_samples) return set;
  std::vector<std::size_t> order(set.samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  order.resize(max_samples);
  std::sort(order.begin(), order.end());

  TrainingSet out;
  out.source = set.source;
  out.samples.reserve(max_samples);
  for (std::size_t i : order) out.samples.push_back(set.samples[i]);
  return out;
}

TrainingSet merge(const std::vector<TrainingSet>& sets) {
  if (sets.empty()) throw std::invalid_argument("merge: no training sets");
  TrainingSet out;
  out.source = sets.front().source;
  out.source.shape_id.clear();
  for (const TrainingSet& s : sets) {
    if (s.dimension() != sets.front().dimension() || s.source.mode != sets.front().source.mode) {
      throw std::invalid_argument("merge: training sets differ in embedding dimension or mode");
    }
    if (!out.source.shape_id.empty()) out.source.shape_id += '+';
    out.source.shape_id += s.source.shape_id;
    out.samples.insert(out.samples.end(), s.samples.begin(), s.samples.end());
  }
  return out;
}

void write_training_set(const TrainingSet& set, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  const std::size_t dim = set.dimension();
  os.write(kMagic, 4);
  binary::put_u32(os, kVersion);
  binary::put_u64(os, set.source.points);
  binary::put_u64(os, set.source.k);
  binary::put_u64(os, set.source.n);
  binary::put_u64(os, set.source.seed);
  binary::put_string(os, to_string(set.source.mode));
  binary::put_string(os, set.source.shape_id);
  binary::put_u64(os, dim);
  binary::put_u64(os, set.samples.size());
  for (const LabeledEdge& s : set.samples) {
    if (static_cast<std::size_t>(s.embedding.size()) != dim || static_cast<std::size_t>(s.embedding_sym.size()) != dim) {
      throw std::invalid_argument("write_training_set: inconsistent embedding dimension");
    }
    binary::put_u32(os, s.edge.i);
    binary::put_u32(os, s.edge.j);
    binary::put_f64(os, s.edge.length);
    for (double v : s.embedding.values) binary::put_f64(os, v);
    for (double v : s.embedding_sym.values) binary::put_f64(os, v);
    binary::put_f64(os, s.label);
  }
  if (!os) throw IoError("write to '" + path + "' failed");
}

TrainingSet read_training_set(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  binary::Reader in(is, path);
  in.expect_magic(kMagic);
  if (const auto version = in.u32(); version != kVersion) {
    throw ParseError(path, 0, "unsupported training-set version " + std::to_string(version));
  }
  TrainingSet set;
  set.source.points = in.u64();
  set.source.k = in.u64();
  set.source.n = in.u64();
  set.source.seed = in.u64();
  try {
    set.source.mode = embedding_mode_from_string(in.string(64));
  } catch (const std::invalid_argument& e) {
    throw ParseError(path, 0, e.what());
  }
  set.source.shape_id = in.string();
  const std::uint64_t dim = in.u64();
  const std::uint64_t count = in.u64();
  if (dim != 3 * set.source.n) throw ParseError(path, 0, "embedding dimension does not match n");
  set.samples.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 24)));
  for (std::uint64_t r = 0; r < count; ++r) {
    LabeledEdge s;
    s.edge.i = in.u32();
    s.edge.j = in.u32();
    s.edge.length = in.f64();
    s.embedding.values.resize(static_cast<Eigen::Index>(dim));
    s.embedding_sym.values.resize(static_cast<Eigen::Index>(dim));
    for (auto& v : s.embedding.values) v = in.f64();
    for (auto& v : s.embedding_sym.values) v = in.f64();
    s.label = in.f64();
    set.samples.push_back(std::move(s));
  }
  return set;
}

}  // namespace edgerecon
