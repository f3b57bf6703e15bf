#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edgerecon/assembly.hpp"
#include "edgerecon/metrics.hpp"
#include "edgerecon/regressor.hpp"

namespace edgerecon {

// Everything a CLI run depends on. Serialized as a flat JSON object whose keys
// are the field names below; unknown keys are rejected.
struct PipelineConfig {
  // candidates / embedding
  std::size_t k = 32;
  std::size_t n = 50;
  bool canonical_embedding = true;
  // assembly
  double d_th = 0.014;
  double length_factor = 1.5;
  std::size_t ring_max = 8;
  bool prune_before_filter = false;
  // training
  double learning_rate = 1e-5;
  double lr_decay = 0.3;
  std::vector<std::size_t> decay_milestones;  // empty: 50% and 75% of epochs
  std::size_t batch_size = 256;
  std::size_t epochs = 200;
  std::uint64_t train_seed = 0;
  std::vector<std::size_t> f_widths;  // empty: default architecture
  std::vector<std::size_t> g_widths;
  // data
  std::string shape = "sphere";
  std::size_t points = 500;
  std::uint64_t seed = 1;
  int tessellation = 5;
  std::vector<std::string> train_shapes{"sphere", "torus"};
  std::vector<std::size_t> train_points{500};
  std::size_t train_max_edges = 0;  // per shape and density; 0 keeps all
  // evaluation
  std::size_t eval_samples = kMetricSamples;
  double f_tau = kFScoreThreshold;
  std::uint64_t eval_seed = 0;
  std::vector<std::size_t> sweep_points{250, 500, 1000, 2000};
  // output directory
  std::string out = ".";

  EmbeddingMode mode() const { return canonical_embedding ? EmbeddingMode::kCanonical : EmbeddingMode::kTranslationOnly; }
  AssemblyConfig assembly() const;
  ReconstructionParams reconstruction() const;
  TrainConfig train() const;
  Architecture architecture() const;

  // Throws std::invalid_argument on an out-of-range value.
  void validate() const;

  std::string to_json() const;
  // Fields missing from the JSON keep their current value.
  void merge_json(const std::string& text);
};

PipelineConfig load_config(const std::string& path);
void save_config(const PipelineConfig& cfg, const std::string& path);

}  // namespace edgerecon
