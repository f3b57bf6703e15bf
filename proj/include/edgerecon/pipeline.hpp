#pragma once

#include <functional>
#include <string>
#include <vector>

#include "edgerecon/assembly.hpp"
#include "edgerecon/config.hpp"
#include "edgerecon/metrics.hpp"
#include "edgerecon/regressor.hpp"
#include "edgerecon/shapes.hpp"
#include "edgerecon/supervision.hpp"

namespace edgerecon {

ShapeSpec shape_spec(const PipelineConfig& cfg, const std::string& shape, std::size_t points, std::uint64_t seed);

// Labeled edges for one shape: cloud sampled with `points` points, labels
// from the shape's ground-truth mesh.
TrainingSet make_training_set(const PipelineConfig& cfg, const ShapeData& shape, const std::string& id);

// Every (train_shapes x train_points) combination, each subsampled to
// train_max_edges, merged into one set. Clouds use seeds derived from
// cfg.seed that never coincide with the evaluation cloud's seed.
TrainingSet make_training_data(const PipelineConfig& cfg);

struct TrainedModel {
  ModelCheckpoint checkpoint;
  std::vector<double> loss_history;
};

TrainedModel train_model(const TrainingSet& data, const PipelineConfig& cfg,
                         const std::function<void(std::size_t, double)>& on_epoch = {});

// Normalizes `cloud`, reconstructs with the checkpoint, and returns the mesh
// with the caller's (un-normalized) points as vertices. The checkpoint's n
// and embedding mode take precedence over the config.
ReconstructionResult reconstruct_cloud(const PointCloud& cloud, const ModelCheckpoint& model,
                                       const PipelineConfig& cfg);

// Metrics after mapping both meshes into the unit cube of the ground truth.
MetricReport evaluate_meshes(const TriMesh& recon, const TriMesh& gt, const PipelineConfig& cfg);

struct SweepRow {
  std::size_t points = 0;
  std::size_t faces = 0;
  MetricReport report;
};

// Reconstructs cfg.shape at each density in `densities` with one model.
std::vector<SweepRow> density_sweep(const ModelCheckpoint& model, const PipelineConfig& cfg,
                                    const std::vector<std::size_t>& densities);

std::string sweep_table(const std::vector<SweepRow>& rows);

}  // namespace edgerecon
