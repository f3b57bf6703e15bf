#include "edgerecon/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "edgerecon/errors.hpp"
#include "edgerecon/mesh_io.hpp"
#include "edgerecon/pipeline.hpp"

namespace edgerecon::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  PipelineConfig cfg;
  std::string config_path;
  bool no_canonical = false;
  bool quiet = false;
  std::vector<std::string> data;
  std::string model;
  std::string cloud;
  std::string recon;
  std::string gt;
  std::size_t points = 0;
  std::vector<std::size_t> sweep_points;
};

// --config is applied before the other flags so they can override it.
std::string find_config(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return {};
}

void add_common(CLI::App* app, Options& o) {
  app->add_option("--config", o.config_path, "JSON config file; flags override its values");
  app->add_option("--out", o.cfg.out, "output directory");
  app->add_option("--seed", o.cfg.seed, "data seed");
  app->add_option("--k", o.cfg.k, "candidate neighbors per point");
  app->add_option("--n", o.cfg.n, "neighbors per edge embedding");
  app->add_flag("--no-canonical-embedding", o.no_canonical, "midpoint-centered coordinates without the edge frame");
  app->add_flag("-q,--quiet", o.quiet, "no progress output");
}

void add_shape(CLI::App* app, Options& o) {
  app->add_option("--shape", o.cfg.shape, "sphere, torus, box, cylinder, or a mesh path");
  app->add_option("--points", o.cfg.points, "points sampled on the shape");
  app->add_option("--tessellation", o.cfg.tessellation, "analytic mesh subdivision level");
}

void add_assembly(CLI::App* app, Options& o) {
  app->add_option("--dth", o.cfg.d_th, "edge distance threshold");
  app->add_option("--length-factor", o.cfg.length_factor, "long-edge factor over the mean length");
  app->add_option("--ring-max", o.cfg.ring_max, "largest boundary ring to fill");
}

void add_training(CLI::App* app, Options& o) {
  app->add_option("--epochs", o.cfg.epochs, "training epochs");
  app->add_option("--lr", o.cfg.learning_rate, "initial learning rate");
  app->add_option("--batch-size", o.cfg.batch_size, "mini-batch size");
  app->add_option("--train-seed", o.cfg.train_seed, "initialization and shuffling seed");
  app->add_option("--train-shapes", o.cfg.train_shapes, "training shapes")->delimiter(',');
  app->add_option("--train-points", o.cfg.train_points, "training cloud sizes")->delimiter(',');
  app->add_option("--max-edges", o.cfg.train_max_edges, "labeled edges kept per training cloud (0 = all)");
}

void add_eval(CLI::App* app, Options& o) {
  app->add_option("--samples", o.cfg.eval_samples, "surface samples per mesh");
  app->add_option("--tau", o.cfg.f_tau, "F-score distance threshold");
  app->add_option("--eval-seed", o.cfg.eval_seed, "sampling seed for metrics");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write '" + path.string() + "'");
  os << text;
}

void write_loss(const fs::path& path, const std::vector<double>& history) {
  std::ostringstream os;
  os << "epoch\tloss\n" << std::setprecision(12);
  for (std::size_t e = 0; e < history.size(); ++e) os << e + 1 << '\t' << history[e] << '\n';
  write_text(path, os.str());
}

fs::path prepare_out(const PipelineConfig& cfg) {
  const fs::path out(cfg.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create output directory '" + cfg.out + "': " + ec.message());
  save_config(cfg, (out / "config.json").string());
  return out;
}

std::function<void(std::size_t, double)> progress(const Options& o) {
  if (o.quiet) return {};
  const std::size_t total = o.cfg.epochs;
  return [total](std::size_t epoch, double loss) {
    if (epoch == 1 || epoch % 10 == 0 || epoch == total) {
      std::cerr << "epoch " << epoch << "/" << total << " loss " << loss << '\n';
    }
  };
}

TrainedModel train_from_config(const Options& o, const fs::path& out) {
  if (!o.quiet) std::cerr << "building training data\n";
  const TrainingSet data = make_training_data(o.cfg);
  if (!o.quiet) std::cerr << data.samples.size() << " labeled edges\n";
  TrainedModel model = train_model(data, o.cfg, progress(o));
  save_checkpoint(model.checkpoint, (out / "model.bin").string());
  write_loss(out / "loss.tsv", model.loss_history);
  return model;
}

ModelCheckpoint model_for(const Options& o, const fs::path& out) {
  if (!o.model.empty()) {
    ModelCheckpoint m = load_checkpoint(o.model);
    if (m.mode != o.cfg.mode()) throw std::invalid_argument("model embedding mode differs from the requested one");
    return m;
  }
  return train_from_config(o, out).checkpoint;
}

int cmd_gen_data(const Options& o) {
  const fs::path out = prepare_out(o.cfg);
  const ShapeSpec spec = shape_spec(o.cfg, o.cfg.shape, o.cfg.points, o.cfg.seed);
  const ShapeData shape = generate_shape(spec);
  save_mesh(shape.gt, (out / "gt.obj").string());
  save_cloud(shape.cloud, (out / "cloud.xyz").string());
  TrainingSet set = make_training_set(o.cfg, shape, spec.id());
  if (o.cfg.train_max_edges > 0) set = subsample(set, o.cfg.train_max_edges, o.cfg.seed);
  write_training_set(set, (out / "train.bin").string());
  if (!o.quiet) std::cerr << "wrote " << set.samples.size() << " labeled edges to " << out.string() << '\n';
  return kOk;
}

int cmd_train(const Options& o) {
  if (o.data.empty()) {
    train_from_config(o, prepare_out(o.cfg));
    return kOk;
  }
  std::vector<TrainingSet> parts;
  for (const std::string& path : o.data) parts.push_back(read_training_set(path));
  const TrainingSet data = merge(parts);
  // Records carry their own n and embedding mode.
  Options adjusted = o;
  if (data.source.n != o.cfg.n) {
    adjusted.cfg.n = data.source.n;
    adjusted.cfg.f_widths.clear();
  }
  adjusted.cfg.canonical_embedding = data.source.mode == EmbeddingMode::kCanonical;
  const fs::path out = prepare_out(adjusted.cfg);
  TrainedModel model = train_model(data, adjusted.cfg, progress(adjusted));
  save_checkpoint(model.checkpoint, (out / "model.bin").string());
  write_loss(out / "loss.tsv", model.loss_history);
  return kOk;
}

int write_reconstruction(const ReconstructionResult& result, const fs::path& out, const Options& o) {
  write_text(out / "diagnostics.json", result.diagnostics.to_json() + "\n");
  if (result.mesh.empty()) {
    std::cerr << "error: reconstruction produced no faces\n";
    for (const std::string& m : result.diagnostics.messages) std::cerr << "  " << m << '\n';
    return kEmptyMesh;
  }
  save_mesh(result.mesh, (out / "recon.obj").string());
  if (!o.quiet) std::cerr << "wrote " << result.mesh.faces.size() << " faces\n";
  return kOk;
}

int cmd_reconstruct(const Options& o) {
  const fs::path out = prepare_out(o.cfg);
  const ModelCheckpoint model = load_checkpoint(o.model);
  const PointCloud cloud = load_cloud(o.cloud);
  return write_reconstruction(reconstruct_cloud(cloud, model, o.cfg), out, o);
}

int cmd_eval(const Options& o) {
  const fs::path out = prepare_out(o.cfg);
  const TriMesh recon = load_mesh(o.recon);
  const TriMesh gt = load_mesh(o.gt);
  if (recon.empty()) throw EmptyReconstruction("'" + o.recon + "' has no faces");
  const MetricReport report = evaluate_meshes(recon, gt, o.cfg);
  write_text(out / "report.json", report.to_json() + "\n");
  std::cout << report.to_json() << '\n';
  return kOk;
}

int cmd_pipeline(const Options& o) {
  const fs::path out = prepare_out(o.cfg);
  const ModelCheckpoint model = model_for(o, out);
  const ShapeSpec spec = shape_spec(o.cfg, o.cfg.shape, o.cfg.points, o.cfg.seed);
  const ShapeData shape = generate_shape(spec);
  save_mesh(shape.gt, (out / "gt.obj").string());
  save_cloud(shape.cloud, (out / "cloud.xyz").string());
  const ReconstructionResult result = reconstruct_cloud(shape.cloud, model, o.cfg);
  const int code = write_reconstruction(result, out, o);
  if (code != kOk) return code;
  const MetricReport report = evaluate_meshes(result.mesh, shape.gt, o.cfg);
  write_text(out / "report.json", report.to_json() + "\n");
  std::cout << report.to_json() << '\n';
  return kOk;
}

int cmd_sweep(const Options& o) {
  const fs::path out = prepare_out(o.cfg);
  const ModelCheckpoint model = model_for(o, out);
  const std::vector<SweepRow> rows = density_sweep(model, o.cfg, o.cfg.sweep_points);
  const std::string table = sweep_table(rows);
  write_text(out / "sweep.tsv", table);
  std::cout << table;
  return kOk;
}

int dispatch(const std::vector<std::string>& args) {
  Options o;
  const std::string config = find_config(args);
  if (!config.empty()) o.cfg = load_config(config);

  CLI::App app{"Edge-regression surface reconstruction from point clouds"};
  app.require_subcommand(1, 1);

  auto* gen = app.add_subcommand("gen-data", "sample a shape and write gt mesh, cloud and training records");
  add_common(gen, o);
  add_shape(gen, o);
  gen->add_option("--max-edges", o.cfg.train_max_edges, "labeled edges kept (0 = all)");

  auto* tr = app.add_subcommand("train", "train the edge regressor");
  add_common(tr, o);
  add_training(tr, o);
  tr->add_option("--data", o.data, "training record files (default: generate from the config)");

  auto* rec = app.add_subcommand("reconstruct", "reconstruct a mesh from a point cloud");
  add_common(rec, o);
  add_assembly(rec, o);
  rec->add_option("--cloud", o.cloud, "input point cloud (.xyz, .obj, .ply)")->required();
  rec->add_option("--model", o.model, "model checkpoint")->required();

  auto* ev = app.add_subcommand("eval", "compare a reconstruction against a ground-truth mesh");
  add_common(ev, o);
  add_eval(ev, o);
  ev->add_option("--recon", o.recon, "reconstructed mesh")->required();
  ev->add_option("--gt", o.gt, "ground-truth mesh")->required();

  auto* pipe = app.add_subcommand("pipeline", "generate, train, reconstruct and evaluate");
  add_common(pipe, o);
  add_shape(pipe, o);
  add_training(pipe, o);
  add_assembly(pipe, o);
  add_eval(pipe, o);
  pipe->add_option("--model", o.model, "skip training and use this checkpoint");

  auto* sw = app.add_subcommand("sweep", "reconstruct one shape at several densities with one model");
  add_common(sw, o);
  sw->add_option("--shape", o.cfg.shape, "held-out shape");
  sw->add_option("--tessellation", o.cfg.tessellation, "analytic mesh subdivision level");
  sw->add_option("--points", o.cfg.sweep_points, "densities, comma separated")->delimiter(',');
  add_training(sw, o);
  add_assembly(sw, o);
  add_eval(sw, o);
  sw->add_option("--model", o.model, "skip training and use this checkpoint");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }
  for (auto* sub : {gen, tr, rec, ev, pipe, sw}) {
    if (sub->parsed() && sub->get_option("--no-canonical-embedding")->count() > 0) o.cfg.canonical_embedding = false;
  }
  o.cfg.validate();

  if (gen->parsed()) return cmd_gen_data(o);
  if (tr->parsed()) return cmd_train(o);
  if (rec->parsed()) return cmd_reconstruct(o);
  if (ev->parsed()) return cmd_eval(o);
  if (pipe->parsed()) return cmd_pipeline(o);
  return cmd_sweep(o);
}

}  // namespace

int run(const std::vector<std::string>& args) {
  try {
    return dispatch(args);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadData;
  } catch (const DegenerateInputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadData;
  } catch (const EmptyReconstruction& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kEmptyMesh;
  } catch (const TrainingDiverged& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDiverged;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace edgerecon::cli
