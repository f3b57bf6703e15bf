#include "edgerecon/pipeline.hpp"

#include <sstream>
#include <stdexcept>

#include "edgerecon/errors.hpp"

namespace edgerecon {

namespace {

// Training clouds never share a seed with an evaluation cloud.
constexpr std::uint64_t kTrainSeedOffset = 1'000'003;

}  // namespace

ShapeSpec shape_spec(const PipelineConfig& cfg, const std::string& shape, std::size_t points, std::uint64_t seed) {
  ShapeSpec spec = ShapeSpec::named(shape, points, seed);
  spec.tessellation = cfg.tessellation;
  spec.validate();
  return spec;
}

TrainingSet make_training_set(const PipelineConfig& cfg, const ShapeData& shape, const std::string& id) {
  TrainingSetSource src;
  src.shape_id = id;
  src.seed = cfg.seed;
  src.points = shape.cloud.size();
  src.k = cfg.k;
  src.n = cfg.n;
  src.mode = cfg.mode();
  return build_training_set(shape.cloud, shape.gt, src);
}

TrainingSet make_training_data(const PipelineConfig& cfg) {
  std::vector<TrainingSet> parts;
  std::uint64_t counter = 0;
  for (const std::string& name : cfg.train_shapes) {
    for (std::size_t points : cfg.train_points) {
      const std::uint64_t seed = cfg.seed + kTrainSeedOffset * (++counter);
      const ShapeSpec spec = shape_spec(cfg, name, points, seed);
      const ShapeData shape = generate_shape(spec);
      TrainingSet set = make_training_set(cfg, shape, spec.id());
      set.source.seed = seed;
      if (cfg.train_max_edges > 0) set = subsample(set, cfg.train_max_edges, seed);
      parts.push_back(std::move(set));
    }
  }
  return merge(parts);
}

TrainedModel train_model(const TrainingSet& data, const PipelineConfig& cfg,
                         const std::function<void(std::size_t, double)>& on_epoch) {
  if (data.source.n != cfg.n || data.source.mode != cfg.mode()) {
    throw std::invalid_argument("training data was built with different n or embedding mode than the config");
  }
  TrainConfig tc = cfg.train();
  tc.on_epoch = on_epoch;
  TrainResult result = train(data, tc, cfg.architecture());
  TrainedModel out;
  out.checkpoint.params = std::move(result.params);
  out.checkpoint.neighbors = cfg.n;
  out.checkpoint.mode = cfg.mode();
  out.checkpoint.seed = cfg.train_seed;
  out.loss_history = std::move(result.loss_history);
  return out;
}

ReconstructionResult reconstruct_cloud(const PointCloud& cloud, const ModelCheckpoint& model,
                                       const PipelineConfig& cfg) {
  check_cloud(cloud);
  const auto [normalized, record] = normalize_cloud(cloud);
  ReconstructionParams params = cfg.reconstruction();
  params.n = model.neighbors;
  params.mode = model.mode;
  ReconstructionResult result = reconstruct(normalized, model.params, params);
  result.mesh.vertices = cloud.points;
  return result;
}

MetricReport evaluate_meshes(const TriMesh& recon, const TriMesh& gt, const PipelineConfig& cfg) {
  if (gt.vertices.empty()) throw std::invalid_argument("evaluate: ground-truth mesh has no vertices");
  PointCloud gt_points;
  gt_points.points = gt.vertices;
  const NormalizationRecord record = normalize_cloud(gt_points).second;
  return evaluate(transform_mesh(recon, record), transform_mesh(gt, record), cfg.eval_samples, cfg.f_tau,
                  cfg.eval_seed);
}

std::vector<SweepRow> density_sweep(const ModelCheckpoint& model, const PipelineConfig& cfg,
                                    const std::vector<std::size_t>& densities) {
  std::vector<SweepRow> rows;
  const TriMesh raw_gt = shape_mesh(shape_spec(cfg, cfg.shape, cfg.points, cfg.seed));
  for (std::size_t points : densities) {
    const ShapeData shape = generate_shape(shape_spec(cfg, cfg.shape, points, cfg.seed));
    PointCloud raw;
    for (const Point3& p : shape.cloud.points) raw.points.push_back(shape.record.invert(p));
    const ReconstructionResult result = reconstruct_cloud(raw, model, cfg);
    SweepRow row;
    row.points = points;
    row.faces = result.mesh.faces.size();
    if (result.mesh.empty()) {
      throw EmptyReconstruction("sweep: empty reconstruction at " + std::to_string(points) + " points");
    }
    row.report = evaluate_meshes(result.mesh, raw_gt, cfg);
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_table(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "points\tfaces\t" << MetricReport::tsv_header() << '\n';
  for (const SweepRow& r : rows) os << r.points << '\t' << r.faces << '\t' << r.report.to_tsv() << '\n';
  return os.str();
}

}  // namespace edgerecon
