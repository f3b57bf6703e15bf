#include "edgerecon/regressor.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "edgerecon/binary_io.hpp"
#include "edgerecon/errors.hpp"
#include "edgerecon/random.hpp"

namespace edgerecon {

namespace {

constexpr char kMagic[] = "ERCK";
constexpr std::uint32_t kVersion = 1;
constexpr Eigen::Index kPredictChunk = 1024;

using Matrix = Eigen::MatrixXd;

// Activations of one feature-extractor branch: inputs[l] feeds layer l,
// pre[l] is that layer's pre-activation.
struct BranchTrace {
  std::vector<Matrix> inputs;
  std::vector<Matrix> pre;
  Matrix output;
};

struct Trace {
  BranchTrace orig, sym;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> orig_wins;
  std::vector<Matrix> head_inputs;
  std::vector<Matrix> head_pre;
  Eigen::RowVectorXd output;
};

Matrix affine(const DenseLayer& layer, const Matrix& x) {
  Matrix z = layer.weight * x;
  z.colwise() += layer.bias;
  return z;
}

Matrix relu(const Matrix& z) { return z.cwiseMax(0.0); }

BranchTrace run_branch(const RegressorParams& params, const Matrix& x, bool keep) {
  BranchTrace t;
  Matrix a = x;
  for (const DenseLayer& layer : params.f_layers) {
    Matrix z = affine(layer, a);
    if (keep) {
      t.inputs.push_back(std::move(a));
      t.pre.push_back(z);
    }
    a = relu(z);
  }
  t.output = std::move(a);
  return t;
}

Trace run(const RegressorParams& params, const Matrix& emb, const Matrix& emb_sym, bool keep) {
  if (static_cast<std::size_t>(emb.rows()) != params.arch.input_dimension() || emb.rows() != emb_sym.rows() ||
      emb.cols() != emb_sym.cols()) {
    throw std::invalid_argument("regressor: embedding dimension " + std::to_string(emb.rows()) +
                                " does not match input width " + std::to_string(params.arch.input_dimension()));
  }
  Trace t;
  t.orig = run_branch(params, emb, keep);
  t.sym = run_branch(params, emb_sym, keep);
  t.orig_wins = t.orig.output.array() >= t.sym.output.array();
  Matrix h = t.orig_wins.select(t.orig.output, t.sym.output);

  const std::size_t last = params.g_layers.size() - 1;
  for (std::size_t l = 0; l < params.g_layers.size(); ++l) {
    Matrix z = affine(params.g_layers[l], h);
    if (keep) {
      t.head_inputs.push_back(std::move(h));
      t.head_pre.push_back(z);
    }
    h = l == last ? std::move(z) : relu(z);
  }
  t.output = h.row(0);
  return t;
}

void backprop_branch(const RegressorParams& params, const BranchTrace& t, Matrix grad_out,
                     std::vector<DenseLayer>& grads) {
  for (std::size_t l = params.f_layers.size(); l-- > 0;) {
    grad_out = (t.pre[l].array() > 0.0).select(grad_out, 0.0);
    grads[l].weight.noalias() += grad_out * t.inputs[l].transpose();
    grads[l].bias += grad_out.rowwise().sum();
    if (l > 0) grad_out = params.f_layers[l].weight.transpose() * grad_out;
  }
}

template <typename Fn>
void for_each_tensor(RegressorParams& a, Fn&& fn) {
  for (auto* layers : {&a.f_layers, &a.g_layers}) {
    for (DenseLayer& layer : *layers) {
      fn(layer.weight.array());
      fn(layer.bias.array());
    }
  }
}

Matrix pack(const std::vector<EmbeddingPair>& pairs, std::size_t begin, std::size_t end, bool symmetric,
            Eigen::Index dim) {
  Matrix m(dim, static_cast<Eigen::Index>(end - begin));
  for (std::size_t c = begin; c < end; ++c) {
    const EdgeEmbedding& e = symmetric ? pairs[c].symmetric : pairs[c].original;
    if (e.size() != dim) throw std::invalid_argument("predict_batch: inconsistent embedding dimension");
    m.col(static_cast<Eigen::Index>(c - begin)) = e.values;
  }
  return m;
}

nlohmann::json arch_json(const Architecture& arch) {
  return {{"f_widths", arch.f_widths}, {"g_widths", arch.g_widths}, {"activation", arch.activation}};
}

nlohmann::json descriptor_json(const ModelCheckpoint& model) {
  return {{"format", "edgerecon-checkpoint"},
          {"version", kVersion},
          {"architecture", arch_json(model.params.arch)},
          {"neighbors", model.neighbors},
          {"embedding", to_string(model.mode)},
          {"seed", model.seed},
          {"parameters", model.params.parameter_count()},
          {"normalization", "inputs in unit-cube normalized cloud coordinates"},
          {"encoding", "little-endian IEEE-754 float64, weights row-major, f layers then g layers"}};
}

}  // namespace

Architecture Architecture::defaults(std::size_t neighbors) {
  return Architecture{{3 * neighbors, 256, 256, 256}, {256, 128, 64, 1}, "relu"};
}

void Architecture::validate() const {
  if (f_widths.size() < 2 || g_widths.size() < 2) {
    throw std::invalid_argument("architecture: each stack needs at least one layer");
  }
  if (f_widths.back() != g_widths.front()) {
    throw std::invalid_argument("architecture: feature width " + std::to_string(f_widths.back()) +
                                " does not feed head width " + std::to_string(g_widths.front()));
  }
  if (g_widths.back() != 1) throw std::invalid_argument("architecture: head must end in width 1");
  for (std::size_t w : f_widths) {
    if (w == 0) throw std::invalid_argument("architecture: zero width");
  }
  for (std::size_t w : g_widths) {
    if (w == 0) throw std::invalid_argument("architecture: zero width");
  }
  if (activation != "relu") throw std::invalid_argument("architecture: unsupported activation " + activation);
}

std::size_t RegressorParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto* layers : {&f_layers, &g_layers}) {
    for (const DenseLayer& l : *layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  }
  return n;
}

RegressorParams init_params(const Architecture& arch, std::uint64_t seed) {
  arch.validate();
  Rng rng(seed);
  RegressorParams p;
  p.arch = arch;
  auto make = [&](const std::vector<std::size_t>& widths, std::vector<DenseLayer>& out) {
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
      const auto in = static_cast<Eigen::Index>(widths[l]);
      const auto outw = static_cast<Eigen::Index>(widths[l + 1]);
      const double bound = 1.0 / std::sqrt(static_cast<double>(in));
      DenseLayer layer{Matrix(outw, in), Eigen::VectorXd::Zero(outw)};
      for (Eigen::Index r = 0; r < outw; ++r) {
        for (Eigen::Index c = 0; c < in; ++c) layer.weight(r, c) = rng.uniform(-bound, bound);
      }
      out.push_back(std::move(layer));
    }
  };
  make(arch.f_widths, p.f_layers);
  make(arch.g_widths, p.g_layers);
  return p;
}

Gradients zeros_like(const RegressorParams& params) {
  Gradients g = params;
  for_each_tensor(g, [](auto&& t) { t.setZero(); });
  return g;
}

double forward(const RegressorParams& params, const EdgeEmbedding& emb, const EdgeEmbedding& emb_sym) {
  return run(params, emb.values, emb_sym.values, false).output[0];
}

Eigen::VectorXd forward_batch(const RegressorParams& params, const Eigen::MatrixXd& emb,
                              const Eigen::MatrixXd& emb_sym) {
  return run(params, emb, emb_sym, false).output.transpose();
}

double batch_loss(const Eigen::VectorXd& predicted, const Eigen::VectorXd& target) {
  if (predicted.size() == 0) return 0.0;
  return (predicted - target).squaredNorm() / static_cast<double>(predicted.size());
}

Gradients backward_batch(const RegressorParams& params, const Eigen::MatrixXd& emb,
                         const Eigen::MatrixXd& emb_sym, const Eigen::VectorXd& target, double* mean_loss) {
  const Trace t = run(params, emb, emb_sym, true);
  const Eigen::Index batch = emb.cols();
  const Eigen::RowVectorXd err = t.output - target.transpose();
  if (mean_loss) *mean_loss = err.squaredNorm() / static_cast<double>(batch);

  Gradients g = zeros_like(params);
  Matrix grad = 2.0 / static_cast<double>(batch) * err;
  const std::size_t last = params.g_layers.size() - 1;
  for (std::size_t l = params.g_layers.size(); l-- > 0;) {
    if (l != last) grad = (t.head_pre[l].array() > 0.0).select(grad, 0.0);
    g.g_layers[l].weight.noalias() += grad * t.head_inputs[l].transpose();
    g.g_layers[l].bias += grad.rowwise().sum();
    grad = params.g_layers[l].weight.transpose() * grad;
  }
  backprop_branch(params, t.orig, t.orig_wins.select(grad, 0.0), g.f_layers);
  backprop_branch(params, t.sym, t.orig_wins.select(0.0, grad), g.f_layers);
  return g;
}

Gradients backward(const RegressorParams& params, const EdgeEmbedding& emb, const EdgeEmbedding& emb_sym,
                   double target) {
  return backward_batch(params, emb.values, emb_sym.values, Eigen::VectorXd::Constant(1, target));
}

AdamState init_adam(const RegressorParams& params, double learning_rate) {
  AdamState s;
  s.first_moment = zeros_like(params);
  s.second_moment = zeros_like(params);
  s.learning_rate = learning_rate;
  return s;
}

void adam_step(RegressorParams& params, AdamState& state, const Gradients& grads) {
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);

  auto update = [&](DenseLayer& p, DenseLayer& m, DenseLayer& v, const DenseLayer& g) {
    auto step = [&](auto&& pa, auto&& ma, auto&& va, auto&& ga) {
      ma = state.beta1 * ma + (1.0 - state.beta1) * ga;
      va = state.beta2 * va + (1.0 - state.beta2) * ga.square();
      pa -= state.learning_rate * (ma / c1) / ((va / c2).sqrt() + state.epsilon);
    };
    step(p.weight.array(), m.weight.array(), v.weight.array(), g.weight.array());
    step(p.bias.array(), m.bias.array(), v.bias.array(), g.bias.array());
  };
  for (std::size_t l = 0; l < params.f_layers.size(); ++l) {
    update(params.f_layers[l], state.first_moment.f_layers[l], state.second_moment.f_layers[l], grads.f_layers[l]);
  }
  for (std::size_t l = 0; l < params.g_layers.size(); ++l) {
    update(params.g_layers[l], state.first_moment.g_layers[l], state.second_moment.g_layers[l], grads.g_layers[l]);
  }
}

std::vector<std::size_t> TrainConfig::resolved_milestones() const {
  if (!decay_milestones.empty()) return decay_milestones;
  return {epochs / 2, (3 * epochs) / 4};
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("train: learning rate must be positive");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw std::invalid_argument("train: lr decay must be in (0, 1]");
  if (batch_size == 0) throw std::invalid_argument("train: batch size must be positive");
}

TrainResult train(const TrainingSet& dataset, const TrainConfig& cfg) {
  return train(dataset, cfg, Architecture::defaults(dataset.dimension() / 3));
}

TrainResult train(const TrainingSet& dataset, const TrainConfig& cfg, const Architecture& arch) {
  cfg.validate();
  if (dataset.samples.empty()) throw std::invalid_argument("train: empty training set");
  const auto dim = static_cast<Eigen::Index>(dataset.dimension());
  const auto count = dataset.samples.size();

  Matrix all(dim, static_cast<Eigen::Index>(count));
  Matrix all_sym(dim, static_cast<Eigen::Index>(count));
  Eigen::VectorXd labels(static_cast<Eigen::Index>(count));
  for (std::size_t s = 0; s < count; ++s) {
    const LabeledEdge& e = dataset.samples[s];
    if (e.embedding.size() != dim || e.embedding_sym.size() != dim) {
      throw std::invalid_argument("train: inconsistent embedding dimension in sample " + std::to_string(s));
    }
    all.col(static_cast<Eigen::Index>(s)) = e.embedding.values;
    all_sym.col(static_cast<Eigen::Index>(s)) = e.embedding_sym.values;
    labels[static_cast<Eigen::Index>(s)] = e.label;
  }

  TrainResult result;
  result.params = init_params(arch, cfg.seed);
  AdamState adam = init_adam(result.params, cfg.learning_rate);
  const std::vector<std::size_t> milestones = cfg.resolved_milestones();

  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<Eigen::Index> order(count);
  for (std::size_t s = 0; s < count; ++s) order[s] = static_cast<Eigen::Index>(s);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double sum = 0.0;
    for (std::size_t begin = 0; begin < count; begin += cfg.batch_size) {
      const std::size_t end = std::min(count, begin + cfg.batch_size);
      const auto b = static_cast<Eigen::Index>(end - begin);
      Matrix x(dim, b), xs(dim, b);
      Eigen::VectorXd y(b);
      for (Eigen::Index c = 0; c < b; ++c) {
        const Eigen::Index s = order[begin + static_cast<std::size_t>(c)];
        x.col(c) = all.col(s);
        xs.col(c) = all_sym.col(s);
        y[c] = labels[s];
      }
      double batch_mean = 0.0;
      const Gradients g = backward_batch(result.params, x, xs, y, &batch_mean);
      if (!std::isfinite(batch_mean)) {
        std::ostringstream msg;
        msg << "train: non-finite loss at epoch " << epoch << ", batch starting at sample " << begin
            << " (learning rate " << adam.learning_rate << ")";
        throw TrainingDiverged(msg.str());
      }
      sum += batch_mean * static_cast<double>(b);
      adam_step(result.params, adam, g);
    }
    const double mean = sum / static_cast<double>(count);
    result.loss_history.push_back(mean);
    if (cfg.on_epoch) cfg.on_epoch(epoch, mean);
    for (std::size_t m : milestones) {
      if (m == epoch) adam.learning_rate *= cfg.lr_decay;
    }
  }
  return result;
}

std::vector<double> predict_batch(const RegressorParams& params, const std::vector<EmbeddingPair>& pairs) {
  std::vector<double> out;
  out.reserve(pairs.size());
  const auto dim = static_cast<Eigen::Index>(params.arch.input_dimension());
  for (std::size_t begin = 0; begin < pairs.size(); begin += kPredictChunk) {
    const std::size_t end = std::min(pairs.size(), begin + static_cast<std::size_t>(kPredictChunk));
    const Eigen::VectorXd y = forward_batch(params, pack(pairs, begin, end, false, dim), pack(pairs, begin, end, true, dim));
    for (Eigen::Index k = 0; k < y.size(); ++k) out.push_back(std::max(0.0, y[k]));
  }
  return out;
}

void save_checkpoint(const ModelCheckpoint& model, const std::string& path) {
  const nlohmann::json desc = descriptor_json(model);
  {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    os.write(kMagic, 4);
    binary::put_u32(os, kVersion);
    binary::put_string(os, desc.dump());
    for (const auto* layers : {&model.params.f_layers, &model.params.g_layers}) {
      for (const DenseLayer& l : *layers) {
        binary::put_u64(os, static_cast<std::uint64_t>(l.weight.rows()));
        binary::put_u64(os, static_cast<std::uint64_t>(l.weight.cols()));
        for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
          for (Eigen::Index c = 0; c < l.weight.cols(); ++c) binary::put_f64(os, l.weight(r, c));
        }
        for (Eigen::Index r = 0; r < l.bias.size(); ++r) binary::put_f64(os, l.bias[r]);
      }
    }
    if (!os) throw IoError("write to '" + path + "' failed");
  }
  std::ofstream js(path + ".json");
  if (!js) throw IoError("cannot open '" + path + ".json' for writing");
  js << desc.dump(2) << '\n';
}

ModelCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  binary::Reader in(is, path);
  in.expect_magic(kMagic);
  if (const auto version = in.u32(); version != kVersion) {
    throw ParseError(path, 0, "unsupported checkpoint version " + std::to_string(version));
  }
  ModelCheckpoint model;
  try {
    const auto desc = nlohmann::json::parse(in.string());
    const auto& a = desc.at("architecture");
    model.params.arch.f_widths = a.at("f_widths").get<std::vector<std::size_t>>();
    model.params.arch.g_widths = a.at("g_widths").get<std::vector<std::size_t>>();
    model.params.arch.activation = a.at("activation").get<std::string>();
    model.params.arch.validate();
    model.neighbors = desc.at("neighbors").get<std::size_t>();
    model.mode = embedding_mode_from_string(desc.at("embedding").get<std::string>());
    model.seed = desc.at("seed").get<std::uint64_t>();
  } catch (const std::exception& e) {
    throw ParseError(path, 0, std::string("bad checkpoint header: ") + e.what());
  }
  if (model.params.arch.input_dimension() != 3 * model.neighbors) {
    throw ParseError(path, 0, "input width does not match 3 * neighbors");
  }

  auto read_stack = [&](const std::vector<std::size_t>& widths, std::vector<DenseLayer>& out) {
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
      const auto rows = in.u64();
      const auto cols = in.u64();
      if (rows != widths[l + 1] || cols != widths[l]) throw ParseError(path, 0, "layer shape mismatch");
      DenseLayer layer{Matrix(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)),
                       Eigen::VectorXd(static_cast<Eigen::Index>(rows))};
      for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
        for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = in.f64();
      }
      for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias[r] = in.f64();
      out.push_back(std::move(layer));
    }
  };
  read_stack(model.params.arch.f_widths, model.params.f_layers);
  read_stack(model.params.arch.g_widths, model.params.g_layers);
  return model;
}

}  // namespace edgerecon
