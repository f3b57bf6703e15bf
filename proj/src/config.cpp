#include "edgerecon/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "edgerecon/errors.hpp"

namespace edgerecon {

using nlohmann::json;

AssemblyConfig PipelineConfig::assembly() const {
  AssemblyConfig a;
  a.d_th = d_th;
  a.length_factor = length_factor;
  a.ring_max = ring_max;
  a.prune_before_filter = prune_before_filter;
  return a;
}

ReconstructionParams PipelineConfig::reconstruction() const {
  ReconstructionParams r;
  r.k = k;
  r.n = n;
  r.mode = mode();
  r.assembly = assembly();
  return r;
}

TrainConfig PipelineConfig::train() const {
  TrainConfig t;
  t.learning_rate = learning_rate;
  t.lr_decay = lr_decay;
  t.decay_milestones = decay_milestones;
  t.batch_size = batch_size;
  t.epochs = epochs;
  t.seed = train_seed;
  return t;
}

Architecture PipelineConfig::architecture() const {
  Architecture arch = Architecture::defaults(n);
  if (!f_widths.empty()) arch.f_widths = f_widths;
  if (!g_widths.empty()) arch.g_widths = g_widths;
  // The first f width is always the input size.
  arch.f_widths.front() = 3 * n;
  return arch;
}

void PipelineConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
  if (k < 1) fail("k must be at least 1");
  if (n < 1) fail("n must be at least 1");
  if (points < 4) fail("points must be at least 4");
  if (train_shapes.empty()) fail("train_shapes is empty");
  if (train_points.empty()) fail("train_points is empty");
  for (std::size_t p : train_points) {
    if (p < 4) fail("train_points entries must be at least 4");
  }
  for (std::size_t p : sweep_points) {
    if (p < 4) fail("sweep_points entries must be at least 4");
  }
  if (eval_samples < 1) fail("eval_samples must be positive");
  if (!(f_tau > 0)) fail("f_tau must be positive");
  assembly().validate();
  train().validate();
  architecture().validate();
}

std::string PipelineConfig::to_json() const {
  json j;
  j["k"] = k;
  j["n"] = n;
  j["canonical_embedding"] = canonical_embedding;
  j["d_th"] = d_th;
  j["length_factor"] = length_factor;
  j["ring_max"] = ring_max;
  j["prune_before_filter"] = prune_before_filter;
  j["learning_rate"] = learning_rate;
  j["lr_decay"] = lr_decay;
  j["decay_milestones"] = train().resolved_milestones();
  j["batch_size"] = batch_size;
  j["epochs"] = epochs;
  j["train_seed"] = train_seed;
  const Architecture arch = architecture();
  j["f_widths"] = arch.f_widths;
  j["g_widths"] = arch.g_widths;
  j["shape"] = shape;
  j["points"] = points;
  j["seed"] = seed;
  j["tessellation"] = tessellation;
  j["train_shapes"] = train_shapes;
  j["train_points"] = train_points;
  j["train_max_edges"] = train_max_edges;
  j["eval_samples"] = eval_samples;
  j["f_tau"] = f_tau;
  j["eval_seed"] = eval_seed;
  j["sweep_points"] = sweep_points;
  j["out"] = out;
  return j.dump(2);
}

void PipelineConfig::merge_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const json& v = it.value();
    try {
      if (key == "k") k = v.get<std::size_t>();
      else if (key == "n") n = v.get<std::size_t>();
      else if (key == "canonical_embedding") canonical_embedding = v.get<bool>();
      else if (key == "d_th") d_th = v.get<double>();
      else if (key == "length_factor") length_factor = v.get<double>();
      else if (key == "ring_max") ring_max = v.get<std::size_t>();
      else if (key == "prune_before_filter") prune_before_filter = v.get<bool>();
      else if (key == "learning_rate") learning_rate = v.get<double>();
      else if (key == "lr_decay") lr_decay = v.get<double>();
      else if (key == "decay_milestones") decay_milestones = v.get<std::vector<std::size_t>>();
      else if (key == "batch_size") batch_size = v.get<std::size_t>();
      else if (key == "epochs") epochs = v.get<std::size_t>();
      else if (key == "train_seed") train_seed = v.get<std::uint64_t>();
      else if (key == "f_widths") f_widths = v.get<std::vector<std::size_t>>();
      else if (key == "g_widths") g_widths = v.get<std::vector<std::size_t>>();
      else if (key == "shape") shape = v.get<std::string>();
      else if (key == "points") points = v.get<std::size_t>();
      else if (key == "seed") seed = v.get<std::uint64_t>();
      else if (key == "tessellation") tessellation = v.get<int>();
      else if (key == "train_shapes") train_shapes = v.get<std::vector<std::string>>();
      else if (key == "train_points") train_points = v.get<std::vector<std::size_t>>();
      else if (key == "train_max_edges") train_max_edges = v.get<std::size_t>();
      else if (key == "eval_samples") eval_samples = v.get<std::size_t>();
      else if (key == "f_tau") f_tau = v.get<double>();
      else if (key == "eval_seed") eval_seed = v.get<std::uint64_t>();
      else if (key == "sweep_points") sweep_points = v.get<std::vector<std::size_t>>();
      else if (key == "out") out = v.get<std::string>();
      else throw std::invalid_argument("config: unknown key '" + key + "'");
    } catch (const json::exception& e) {
      throw std::invalid_argument("config: bad value for '" + key + "': " + e.what());
    }
  }
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  PipelineConfig cfg;
  cfg.merge_json(ss.str());
  return cfg;
}

void save_config(const PipelineConfig& cfg, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write config '" + path + "'");
  os << cfg.to_json() << '\n';
}

}  // namespace edgerecon
