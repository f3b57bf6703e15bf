#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <edgerecon/errors.hpp>
#include <edgerecon/regressor.hpp>
#include <edgerecon/shapes.hpp>
#include <edgerecon/spatial_index.hpp>

#include "oracles.hpp"

using namespace edgerecon;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const Architecture kTiny{{6, 4, 3}, {3, 2, 1}, "relu"};

EdgeEmbedding random_embedding(Rng& rng, std::size_t dim) {
  EdgeEmbedding e;
  e.values.resize(static_cast<Eigen::Index>(dim));
  for (Eigen::Index k = 0; k < e.values.size(); ++k) e.values[k] = rng.normal();
  return e;
}

double total_abs(RegressorParams g) {
  double s = 0.0;
  for (double* p : oracle::parameter_refs(g)) s += std::abs(*p);
  return s;
}

TrainingSet small_shape_set(std::size_t per_shape, EmbeddingMode mode = EmbeddingMode::kCanonical) {
  std::vector<TrainingSet> parts;
  std::uint64_t seed = 10;
  for (const char* name : {"sphere", "torus"}) {
    const ShapeData s = generate_shape(ShapeSpec::named(name, 300, seed));
    TrainingSetSource src;
    src.k = 16;
    src.n = 20;
    src.mode = mode;
    src.shape_id = name;
    parts.push_back(subsample(build_training_set(s.cloud, s.gt, src), per_shape, seed++));
  }
  return merge(parts);
}

}  // namespace

TEST_CASE("architecture defaults and validation") {
  const Architecture a = Architecture::defaults(50);
  CHECK(a.f_widths == std::vector<std::size_t>{150, 256, 256, 256});
  CHECK(a.g_widths == std::vector<std::size_t>{256, 128, 64, 1});
  CHECK(a.input_dimension() == 150);
  CHECK_NOTHROW(a.validate());
  CHECK_THROWS(Architecture{{6, 4}, {3, 1}, "relu"}.validate());
  CHECK_THROWS(Architecture{{6, 4}, {4, 2}, "relu"}.validate());
  CHECK_THROWS(Architecture{{6}, {6, 1}, "relu"}.validate());
}

TEST_CASE("init_params") {
  const RegressorParams a = init_params(Architecture::defaults(50), 7);
  const RegressorParams b = init_params(Architecture::defaults(50), 7);
  const RegressorParams c = init_params(Architecture::defaults(50), 8);
  bool differs = false;
  for (std::size_t l = 0; l < a.f_layers.size(); ++l) {
    CHECK(a.f_layers[l].weight == b.f_layers[l].weight);
    CHECK(a.f_layers[l].bias.isZero(0.0));
    const double bound = 1.0 / std::sqrt(static_cast<double>(a.f_layers[l].weight.cols()));
    CHECK(a.f_layers[l].weight.cwiseAbs().maxCoeff() <= bound);
    differs = differs || a.f_layers[l].weight != c.f_layers[l].weight;
  }
  for (std::size_t l = 0; l < a.g_layers.size(); ++l) {
    CHECK(a.g_layers[l].weight == b.g_layers[l].weight);
    CHECK(a.g_layers[l].bias.isZero(0.0));
    const double bound = 1.0 / std::sqrt(static_cast<double>(a.g_layers[l].weight.cols()));
    CHECK(a.g_layers[l].weight.cwiseAbs().maxCoeff() <= bound);
  }
  CHECK(differs);
  // 150*256 + 256 + 2*(256*256 + 256) + 256*128 + 128 + 128*64 + 64 + 64 + 1
  CHECK(a.parameter_count() == 38656 + 131584 + 32896 + 8256 + 65);
}

TEST_CASE("forward with zero weights returns the final bias") {
  RegressorParams p = init_params(kTiny, 1);
  for (double* v : oracle::parameter_refs(p)) *v = 0.0;
  p.g_layers.back().bias[0] = 0.123;
  Rng rng(2);
  for (int i = 0; i < 5; ++i) {
    CHECK(forward(p, random_embedding(rng, 6), random_embedding(rng, 6)) == 0.123);
  }
}

TEST_CASE("forward is symmetric in its two inputs") {
  const RegressorParams p = init_params(Architecture::defaults(10), 3);
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    const auto a = random_embedding(rng, 30), b = random_embedding(rng, 30);
    CHECK(forward(p, a, b) == forward(p, b, a));
  }
}

TEST_CASE("forward_batch equals per-sample forward") {
  const RegressorParams p = init_params(Architecture::defaults(5), 3);
  Rng rng(5);
  Eigen::MatrixXd x(15, 9), xs(15, 9);
  for (int c = 0; c < 9; ++c) {
    x.col(c) = random_embedding(rng, 15).values;
    xs.col(c) = random_embedding(rng, 15).values;
  }
  const Eigen::VectorXd out = forward_batch(p, x, xs);
  for (int c = 0; c < 9; ++c) {
    CHECK_THAT(out[c], WithinAbs(forward(p, EdgeEmbedding{x.col(c)}, EdgeEmbedding{xs.col(c)}), 1e-12));
  }
}

TEST_CASE("loss arithmetic") {
  CHECK(loss(0.25, 0.25) == 0.0);
  CHECK_THAT(loss(0.3, 0.1), WithinAbs(0.04, 1e-15));
  Eigen::VectorXd pred(2), target(2);
  pred << 0.1, 0.3;
  target << 0.0, 0.0;
  CHECK_THAT(batch_loss(pred, target), WithinAbs(0.05, 1e-15));
}

TEST_CASE("gradient is zero at zero loss and linear in the residual") {
  const RegressorParams p = init_params(kTiny, 11);
  Rng rng(12);
  const auto a = random_embedding(rng, 6), b = random_embedding(rng, 6);
  const double pred = forward(p, a, b);
  CHECK(total_abs(backward(p, a, b, pred)) == 0.0);

  // d/dtheta (pred - t)^2 = 2 (pred - t) dpred/dtheta.
  RegressorParams g1 = backward(p, a, b, pred - 0.5);
  RegressorParams g3 = backward(p, a, b, pred - 1.5);
  const auto r1 = oracle::parameter_refs(g1), r3 = oracle::parameter_refs(g3);
  for (std::size_t k = 0; k < r1.size(); ++k) CHECK_THAT(*r3[k], WithinAbs(3.0 * *r1[k], 1e-12));
}

TEST_CASE("analytic gradients match central differences") {
  Rng rng(13);
  double worst = 0.0;
  std::size_t checked = 0;
  for (int s = 0; s < 20; ++s) {
    const RegressorParams p = init_params(kTiny, 100 + s);
    const auto a = random_embedding(rng, 6), b = random_embedding(rng, 6);
    const auto r = oracle::gradient_check(p, a, b, rng.uniform(-1, 1));
    worst = std::max(worst, r.max_relative_error);
    checked += r.checked;
  }
  INFO("checked " << checked << " entries");
  CHECK(checked > 20 * 30);
  CHECK(worst < 1e-4);
}

TEST_CASE("batched gradient is the mean of per-sample gradients") {
  const RegressorParams p = init_params(kTiny, 21);
  Rng rng(22);
  Eigen::MatrixXd x(6, 5), xs(6, 5);
  Eigen::VectorXd y(5);
  std::vector<RegressorParams> singles;
  double loss_sum = 0.0;
  for (int c = 0; c < 5; ++c) {
    const auto a = random_embedding(rng, 6), b = random_embedding(rng, 6);
    x.col(c) = a.values;
    xs.col(c) = b.values;
    y[c] = rng.uniform();
    singles.push_back(backward(p, a, b, y[c]));
    loss_sum += loss(forward(p, a, b), y[c]);
  }
  double mean_loss = 0.0;
  RegressorParams batch = backward_batch(p, x, xs, y, &mean_loss);
  CHECK_THAT(mean_loss, WithinAbs(loss_sum / 5.0, 1e-12));
  const auto rb = oracle::parameter_refs(batch);
  std::vector<std::vector<double*>> rs;
  for (auto& g : singles) rs.push_back(oracle::parameter_refs(g));
  for (std::size_t k = 0; k < rb.size(); ++k) {
    double mean = 0.0;
    for (auto& r : rs) mean += *r[k];
    CHECK_THAT(*rb[k], WithinAbs(mean / 5.0, 1e-12));
  }
}

TEST_CASE("max-pool tie sends the gradient to the first branch") {
  const RegressorParams p = init_params(kTiny, 31);
  Rng rng(32);
  const auto a = random_embedding(rng, 6);
  // Identical branches: the f-layer gradients must equal those of a
  // single-branch network, i.e. no double counting.
  const RegressorParams g = backward(p, a, a, 5.0);
  const auto result = oracle::gradient_check(p, a, a, 5.0);
  CHECK(result.max_relative_error < 1e-6);
  CHECK(total_abs(g) > 0.0);
}

TEST_CASE("adam step behavior") {
  SECTION("zero gradients leave params unchanged") {
    RegressorParams p = init_params(kTiny, 1);
    const RegressorParams before = p;
    AdamState s = init_adam(p, 0.01);
    adam_step(p, s, zeros_like(p));
    CHECK(s.step == 1);
    auto a = oracle::parameter_refs(p);
    auto b = oracle::parameter_refs(const_cast<RegressorParams&>(before));
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(*a[k] == *b[k]);
  }
  SECTION("first step moves each coordinate by about -lr * sign(g)") {
    RegressorParams p = init_params(kTiny, 2);
    RegressorParams start = p;
    Gradients g = zeros_like(p);
    Rng rng(3);
    for (double* v : oracle::parameter_refs(g)) *v = rng.uniform(-2, 2);
    AdamState s = init_adam(p, 0.01);
    adam_step(p, s, g);
    const auto rp = oracle::parameter_refs(p), r0 = oracle::parameter_refs(start), rg = oracle::parameter_refs(g);
    for (std::size_t k = 0; k < rp.size(); ++k) {
      const double expected = -0.01 * *rg[k] / (std::abs(*rg[k]) + 1e-8);
      CHECK_THAT(*rp[k] - *r0[k], WithinAbs(expected, 1e-9));
    }
  }
  SECTION("minimizing w^2 from w = 1 with lr 0.1") {
    RegressorParams p = init_params(kTiny, 4);
    double& w = p.g_layers.back().bias[0];
    w = 1.0;
    AdamState s = init_adam(p, 0.1);
    double prev = std::abs(w);
    bool crossed = false;
    for (int step = 0; step < 100; ++step) {
      Gradients g = zeros_like(p);
      g.g_layers.back().bias[0] = 2.0 * w;
      adam_step(p, s, g);
      // Momentum overshoots zero eventually; until then the descent is monotone.
      if (!crossed && std::abs(w) >= prev) crossed = true;
      if (step < 10) CHECK(std::abs(w) < prev);
      prev = std::abs(w);
    }
    CHECK(std::abs(w) < 0.01);
  }
}

TEST_CASE("training on constant-prediction labels keeps the loss at zero") {
  const Architecture arch{{6, 8, 4}, {4, 3, 1}, "relu"};
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 4;
  cfg.seed = 77;
  cfg.learning_rate = 1e-3;
  const RegressorParams init = init_params(arch, cfg.seed);
  Rng rng(5);
  const auto a = random_embedding(rng, 6), b = random_embedding(rng, 6);
  TrainingSet set;
  set.source.n = 2;
  for (int i = 0; i < 10; ++i) set.samples.push_back(LabeledEdge{CandidateEdge{0, 1, 1.0}, a, b, forward(init, a, b)});
  const TrainResult r = train(set, cfg, arch);
  for (double l : r.loss_history) CHECK(l == 0.0);
  RegressorParams trained = r.params, initial = init;
  const auto rt = oracle::parameter_refs(trained), ri = oracle::parameter_refs(initial);
  for (std::size_t k = 0; k < rt.size(); ++k) CHECK(*rt[k] == *ri[k]);
}

TEST_CASE("training is deterministic and reduces the loss on shape data") {
  const TrainingSet set = small_shape_set(500);
  REQUIRE(set.samples.size() == 1000);
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.learning_rate = 1e-4;
  cfg.seed = 3;
  const Architecture arch = Architecture::defaults(20);
  const TrainResult a = train(set, cfg, arch);
  REQUIRE(a.loss_history.size() == 200);
  INFO("epoch 1 " << a.loss_history.front() << ", epoch 200 " << a.loss_history.back());
  CHECK(a.loss_history.back() <= 0.1 * a.loss_history.front());

  cfg.epochs = 3;
  const TrainResult b = train(set, cfg, arch);
  const TrainResult c = train(set, cfg, arch);
  CHECK(b.loss_history == c.loss_history);
}

TEST_CASE("learning rate milestones") {
  TrainConfig cfg;
  cfg.epochs = 200;
  CHECK(cfg.resolved_milestones() == std::vector<std::size_t>{100, 150});
  cfg.decay_milestones = {10};
  CHECK(cfg.resolved_milestones() == std::vector<std::size_t>{10});
  cfg.batch_size = 0;
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("training reports divergence") {
  const TrainingSet set = small_shape_set(50);
  TrainingSet bad = set;
  bad.samples[3].label = NAN;
  TrainConfig cfg;
  cfg.epochs = 1;
  CHECK_THROWS_AS(train(bad, cfg, Architecture::defaults(20)), TrainingDiverged);
}

TEST_CASE("predict_batch") {
  const RegressorParams p = init_params(Architecture::defaults(20), 9);
  CHECK(predict_batch(p, {}).empty());

  const ShapeData s = generate_shape(ShapeSpec::named("torus", 200, 1));
  const SpatialIndex index(s.cloud.points);
  const EdgeEmbedder embedder(s.cloud, index, 20);
  std::vector<EmbeddingPair> pairs, swapped;
  for (Index a = 0; a < 30; ++a) {
    pairs.push_back(embedder.oriented(a, a + 50));
    swapped.push_back(embedder.oriented(a + 50, a));
  }
  pairs.push_back(pairs.front());
  swapped.push_back(swapped.front());
  const auto out = predict_batch(p, pairs), out_swapped = predict_batch(p, swapped);
  // Same column at a different batch position; vectorized kernels may differ by an ulp.
  CHECK_THAT(out.front(), WithinAbs(out.back(), 1e-12));
  for (std::size_t k = 0; k < out.size(); ++k) {
    CHECK(out[k] >= 0.0);
    CHECK_THAT(out[k], WithinAbs(out_swapped[k], 1e-6));
    CHECK_THAT(out[k], WithinAbs(std::max(0.0, forward(p, pairs[k].original, pairs[k].symmetric)), 1e-12));
  }
}

TEST_CASE("checkpoint round-trip") {
  ModelCheckpoint m;
  m.params = init_params(Architecture{{12, 7, 5}, {5, 3, 1}, "relu"}, 4);
  m.params.g_layers[0].bias[1] = -0.5;
  m.neighbors = 4;
  m.mode = EmbeddingMode::kTranslationOnly;
  m.seed = 12345678901234ull;
  const auto path = (std::filesystem::temp_directory_path() / "edgerecon_ckpt.bin").string();
  save_checkpoint(m, path);
  CHECK(std::filesystem::exists(path + ".json"));
  const ModelCheckpoint back = load_checkpoint(path);
  CHECK(back.params.arch == m.params.arch);
  CHECK(back.neighbors == 4);
  CHECK(back.mode == EmbeddingMode::kTranslationOnly);
  CHECK(back.seed == m.seed);
  RegressorParams a = m.params, b = back.params;
  const auto ra = oracle::parameter_refs(a), rb = oracle::parameter_refs(b);
  REQUIRE(ra.size() == rb.size());
  for (std::size_t k = 0; k < ra.size(); ++k) CHECK(*ra[k] == *rb[k]);

  {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    os << "ERCK";
  }
  CHECK_THROWS_AS(load_checkpoint(path), ParseError);
  std::filesystem::remove(path);
  std::filesystem::remove(path + ".json");
  CHECK_THROWS_AS(load_checkpoint(path), IoError);
}
