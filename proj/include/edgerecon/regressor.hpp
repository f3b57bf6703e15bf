#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "edgerecon/edge_embedding.hpp"
#include "edgerecon/supervision.hpp"

namespace edgerecon {

// Layer widths of the shared feature extractor (applied to an embedding and
// its symmetric twin) and of the regression head after max-pool fusion.
// Every extractor layer and every hidden head layer is followed by ReLU;
// the head output is linear.
struct Architecture {
  std::vector<std::size_t> f_widths;
  std::vector<std::size_t> g_widths;
  std::string activation = "relu";

  // [3n, 256, 256, 256] / [256, 128, 64, 1]
  static Architecture defaults(std::size_t neighbors);

  std::size_t input_dimension() const { return f_widths.empty() ? 0 : f_widths.front(); }

  /// Throws std::invalid_argument if the widths do not chain.
  void validate() const;

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;
};

struct RegressorParams {
  Architecture arch;
  std::vector<DenseLayer> f_layers;
  std::vector<DenseLayer> g_layers;

  std::size_t parameter_count() const;
};

// Same shapes as the parameters.
using Gradients = RegressorParams;

/// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], zero biases.
RegressorParams init_params(const Architecture& arch, std::uint64_t seed);

Gradients zeros_like(const RegressorParams& params);

/// Raw (unclamped) prediction g(max(f(emb), f(emb_sym))).
double forward(const RegressorParams& params, const EdgeEmbedding& emb, const EdgeEmbedding& emb_sym);

/// Column-wise batched forward; one column per sample.
Eigen::VectorXd forward_batch(const RegressorParams& params, const Eigen::MatrixXd& emb,
                              const Eigen::MatrixXd& emb_sym);

/// Squared error of one prediction.
inline double loss(double predicted, double target) {
  const double e = predicted - target;
  return e * e;
}

/// Mean squared error over a batch.
double batch_loss(const Eigen::VectorXd& predicted, const Eigen::VectorXd& target);

/// Gradient of the squared error of one sample. At max-pool ties the
/// gradient goes to the first (non-symmetric) branch.
Gradients backward(const RegressorParams& params, const EdgeEmbedding& emb, const EdgeEmbedding& emb_sym,
                   double target);

/// Gradient of the batch mean squared error; returns the loss through
/// `mean_loss` when non-null.
Gradients backward_batch(const RegressorParams& params, const Eigen::MatrixXd& emb,
                         const Eigen::MatrixXd& emb_sym, const Eigen::VectorXd& target,
                         double* mean_loss = nullptr);

struct AdamState {
  Gradients first_moment;
  Gradients second_moment;
  std::uint64_t step = 0;
  double learning_rate = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

AdamState init_adam(const RegressorParams& params, double learning_rate);

/// One bias-corrected Adam update in place.
void adam_step(RegressorParams& params, AdamState& state, const Gradients& grads);

struct TrainConfig {
  double learning_rate = 1e-5;
  double lr_decay = 0.3;
  // Epochs (1-based) after which the rate is multiplied by lr_decay. Empty
  // means 50% and 75% of `epochs`.
  std::vector<std::size_t> decay_milestones;
  std::size_t batch_size = 256;
  std::size_t epochs = 200;
  std::uint64_t seed = 0;
  std::function<void(std::size_t epoch, double mean_loss)> on_epoch;

  std::vector<std::size_t> resolved_milestones() const;
  void validate() const;
};

struct TrainResult {
  RegressorParams params;
  std::vector<double> loss_history;  // mean squared error per epoch
};

/// Shuffled mini-batch Adam on the squared-error loss. Deterministic for a
/// fixed seed. Throws TrainingDiverged on a non-finite loss.
TrainResult train(const TrainingSet& dataset, const TrainConfig& cfg, const Architecture& arch);
TrainResult train(const TrainingSet& dataset, const TrainConfig& cfg);

/// Clamped (>= 0) predictions, one per pair, in order.
std::vector<double> predict_batch(const RegressorParams& params, const std::vector<EmbeddingPair>& pairs);

struct ModelCheckpoint {
  RegressorParams params;
  std::size_t neighbors = 50;
  EmbeddingMode mode = EmbeddingMode::kCanonical;
  std::uint64_t seed = 0;
};

/// Writes the binary checkpoint to `path` and a JSON descriptor to
/// `path + ".json"`.
void save_checkpoint(const ModelCheckpoint& model, const std::string& path);
ModelCheckpoint load_checkpoint(const std::string& path);

}  // namespace edgerecon
