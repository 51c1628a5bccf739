#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qaoalab/ansatz.hpp"
#include "qaoalab/baselines.hpp"
#include "qaoalab/graph.hpp"
#include "qaoalab/io.hpp"
#include "qaoalab/objective.hpp"
#include "qaoalab/optimize.hpp"
#include "qaoalab/rqaoa.hpp"

namespace qaoalab {

// ---------------------------------------------------------------------------
// Configuration

struct DatasetSpec {
  std::vector<std::string> families = {"complete", "regular", "random"};
  std::vector<int> sizes = {4, 6, 8, 10, 12, 14, 16, 18};
  int instances_complete = 1;
  int instances_regular = 5;
  int instances_random = 5;
  int regular_degree = 3;
  double edge_p_min = 0.3;
  double edge_p_max = 0.5;
  std::uint64_t master_seed = 20230501;
};

struct MultistartSpec {
  std::vector<double> tqa_dts = {0.3, 0.45, 0.6, 0.75, 0.9};
  int random_starts = 3;
};

/// mode "pure": depth-p cells run layer_scale*p feedback layers and no
/// classical optimizer (circuit calls = layers + 1). mode "hybrid": p
/// feedback layers seed a depth-p standard optimization.
struct FalqonSpec {
  double dt = 0.03;
  std::string mode = "pure";
  int layer_scale = 25;
};

struct WsSpec {
  int rank = 8;
  int iters = 300;
  double eps = 0.25;
};

struct AbSpec {
  double ell = 0.4;
  int rounds = 8;
};

/// ma-QAOA optimization: Nelder-Mead below nm_threshold parameters,
/// Adam on parameter-shift gradients above it.
struct MaSpec {
  int nm_threshold = 48;
  int gd_steps = 30;
  double gd_step = 0.08;
};

struct RqaoaSpec {
  int cutoff = 6;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  std::vector<std::string> variants = {"qaoa", "ma-qaoa", "falqon"};
  std::vector<int> depths = {1, 2, 3, 4, 5, 6, 7, 8};
  int repetitions = 1;
  OptimizerSpec optimizer;
  ObjectiveSpec objective;
  double noise = 0.0;
  int noise_trajectories = 200;
  long shots = 0;  // when > 0, a sampled best-cut ratio is recorded too
  MultistartSpec multistart;
  FalqonSpec falqon;
  WsSpec ws;
  AbSpec ab;
  MaSpec ma;
  RqaoaSpec rqaoa;
};

inline const std::vector<std::string>& known_variants() {
  static const std::vector<std::string> v = {
      "qaoa",    "ma-qaoa", "qaoa-plus", "modified-qaoa",
      "ws-qaoa", "ab-qaoa", "falqon",    "rqaoa"};
  return v;
}

inline bool is_known_variant(const std::string& name) {
  for (const auto& v : known_variants())
    if (v == name) return true;
  return false;
}

inline OptMethod parse_method(const std::string& s) {
  if (s == "nelder-mead") return OptMethod::NelderMead;
  if (s == "spsa") return OptMethod::Spsa;
  if (s == "gradient-descent" || s == "gradient") return OptMethod::GradientAscent;
  if (s == "cobyla-style" || s == "cobyla") return OptMethod::CobylaStyle;
  throw std::invalid_argument("unknown optimizer method: " + s);
}

inline std::string method_name(OptMethod m) {
  switch (m) {
    case OptMethod::NelderMead: return "nelder-mead";
    case OptMethod::Spsa: return "spsa";
    case OptMethod::GradientAscent: return "gradient-descent";
    case OptMethod::CobylaStyle: return "cobyla-style";
  }
  return "?";
}

inline ExperimentConfig parse_config(const json& j) {
  ExperimentConfig cfg;
  if (j.contains("dataset")) {
    const auto& d = j.at("dataset");
    cfg.dataset.families = d.value("families", cfg.dataset.families);
    cfg.dataset.sizes = d.value("sizes", cfg.dataset.sizes);
    cfg.dataset.instances_complete =
        d.value("instances_complete", cfg.dataset.instances_complete);
    cfg.dataset.instances_regular =
        d.value("instances_regular", cfg.dataset.instances_regular);
    cfg.dataset.instances_random =
        d.value("instances_random", cfg.dataset.instances_random);
    cfg.dataset.regular_degree =
        d.value("regular_degree", cfg.dataset.regular_degree);
    cfg.dataset.edge_p_min = d.value("edge_p_min", cfg.dataset.edge_p_min);
    cfg.dataset.edge_p_max = d.value("edge_p_max", cfg.dataset.edge_p_max);
    cfg.dataset.master_seed = d.value("master_seed", cfg.dataset.master_seed);
    for (const auto& f : cfg.dataset.families)
      if (f != "complete" && f != "regular" && f != "random")
        throw std::invalid_argument("config: unknown family " + f);
  }
  cfg.variants = j.value("variants", cfg.variants);
  for (const auto& v : cfg.variants)
    if (!is_known_variant(v))
      throw std::invalid_argument("config: unknown variant " + v);
  cfg.depths = j.value("depths", cfg.depths);
  cfg.repetitions = j.value("repetitions", cfg.repetitions);
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    cfg.optimizer.method = parse_method(o.value("method", std::string("nelder-mead")));
    cfg.optimizer.tol = o.value("tol", cfg.optimizer.tol);
    cfg.optimizer.max_iters = o.value("max_iters", cfg.optimizer.max_iters);
    cfg.optimizer.gd_step = o.value("gd_step", cfg.optimizer.gd_step);
  }
  if (j.contains("objective")) {
    const auto& o = j.at("objective");
    std::string kind = o.value("kind", std::string("expectation"));
    if (kind == "expectation") cfg.objective.kind = ObjectiveKind::Expectation;
    else if (kind == "cvar") cfg.objective.kind = ObjectiveKind::CVar;
    else if (kind == "gibbs") cfg.objective.kind = ObjectiveKind::Gibbs;
    else throw std::invalid_argument("config: unknown objective " + kind);
    cfg.objective.alpha_c = o.value("alpha_c", cfg.objective.alpha_c);
    cfg.objective.eta = o.value("eta", cfg.objective.eta);
    long shots = o.value("shots", 0L);
    if (shots > 0) {
      cfg.objective.estimator = EstimatorKind::Sampled;
      cfg.objective.shots = shots;
    }
  }
  cfg.noise = j.value("noise", cfg.noise);
  cfg.noise_trajectories = j.value("noise_trajectories", cfg.noise_trajectories);
  cfg.shots = j.value("shots", cfg.shots);
  if (j.contains("multistart")) {
    const auto& m = j.at("multistart");
    cfg.multistart.tqa_dts = m.value("tqa_dts", cfg.multistart.tqa_dts);
    cfg.multistart.random_starts =
        m.value("random_starts", cfg.multistart.random_starts);
  }
  if (j.contains("falqon")) {
    const auto& f = j.at("falqon");
    cfg.falqon.dt = f.value("dt", cfg.falqon.dt);
    cfg.falqon.mode = f.value("mode", cfg.falqon.mode);
    cfg.falqon.layer_scale = f.value("layer_scale", cfg.falqon.layer_scale);
    if (cfg.falqon.mode != "pure" && cfg.falqon.mode != "hybrid")
      throw std::invalid_argument("config: falqon.mode must be pure|hybrid");
  }
  if (j.contains("ws")) {
    const auto& w = j.at("ws");
    cfg.ws.rank = w.value("rank", cfg.ws.rank);
    cfg.ws.iters = w.value("iters", cfg.ws.iters);
    cfg.ws.eps = w.value("eps", cfg.ws.eps);
  }
  if (j.contains("ab")) {
    const auto& a = j.at("ab");
    cfg.ab.ell = a.value("ell", cfg.ab.ell);
    cfg.ab.rounds = a.value("rounds", cfg.ab.rounds);
  }
  if (j.contains("ma")) {
    const auto& m = j.at("ma");
    cfg.ma.nm_threshold = m.value("nm_threshold", cfg.ma.nm_threshold);
    cfg.ma.gd_steps = m.value("gd_steps", cfg.ma.gd_steps);
    cfg.ma.gd_step = m.value("gd_step", cfg.ma.gd_step);
  }
  if (j.contains("rqaoa"))
    cfg.rqaoa.cutoff = j.at("rqaoa").value("cutoff", cfg.rqaoa.cutoff);
  return cfg;
}

/// Effective configuration with every default filled in; echoed next to
/// the results so each run documents its own settings.
inline json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["dataset"] = {{"families", cfg.dataset.families},
                  {"sizes", cfg.dataset.sizes},
                  {"instances_complete", cfg.dataset.instances_complete},
                  {"instances_regular", cfg.dataset.instances_regular},
                  {"instances_random", cfg.dataset.instances_random},
                  {"regular_degree", cfg.dataset.regular_degree},
                  {"edge_p_min", cfg.dataset.edge_p_min},
                  {"edge_p_max", cfg.dataset.edge_p_max},
                  {"master_seed", cfg.dataset.master_seed}};
  j["variants"] = cfg.variants;
  j["depths"] = cfg.depths;
  j["repetitions"] = cfg.repetitions;
  j["optimizer"] = {{"method", method_name(cfg.optimizer.method)},
                    {"tol", cfg.optimizer.tol},
                    {"max_iters", cfg.optimizer.max_iters},
                    {"gd_step", cfg.optimizer.gd_step}};
  std::string kind = cfg.objective.kind == ObjectiveKind::Expectation ? "expectation"
                     : cfg.objective.kind == ObjectiveKind::CVar      ? "cvar"
                                                                      : "gibbs";
  j["objective"] = {{"kind", kind},
                    {"alpha_c", cfg.objective.alpha_c},
                    {"eta", cfg.objective.eta},
                    {"shots", cfg.objective.shots}};
  j["noise"] = cfg.noise;
  j["noise_trajectories"] = cfg.noise_trajectories;
  j["shots"] = cfg.shots;
  j["multistart"] = {{"tqa_dts", cfg.multistart.tqa_dts},
                     {"random_starts", cfg.multistart.random_starts}};
  j["falqon"] = {{"dt", cfg.falqon.dt},
                 {"mode", cfg.falqon.mode},
                 {"layer_scale", cfg.falqon.layer_scale}};
  j["ws"] = {{"rank", cfg.ws.rank}, {"iters", cfg.ws.iters}, {"eps", cfg.ws.eps}};
  j["ab"] = {{"ell", cfg.ab.ell}, {"rounds", cfg.ab.rounds}};
  j["ma"] = {{"nm_threshold", cfg.ma.nm_threshold},
             {"gd_steps", cfg.ma.gd_steps},
             {"gd_step", cfg.ma.gd_step}};
  j["rqaoa"] = {{"cutoff", cfg.rqaoa.cutoff}};
  return j;
}

// ---------------------------------------------------------------------------
// Dataset generation

struct InstanceEntry {
  std::string id;
  std::string file;
  std::string family;
  int n = 0;
  std::uint64_t seed = 0;
  double edge_p = -1.0;  // random family only
};

struct Manifest {
  std::uint64_t master_seed = 0;
  std::vector<InstanceEntry> instances;
  std::vector<std::string> skipped;
};

inline json manifest_to_json(const Manifest& m) {
  json arr = json::array();
  for (const auto& e : m.instances) {
    json je = {{"id", e.id}, {"file", e.file},   {"family", e.family},
               {"n", e.n},   {"seed", e.seed}};
    if (e.edge_p >= 0.0) je["edge_p"] = e.edge_p;
    arr.push_back(je);
  }
  return json{{"master_seed", m.master_seed},
              {"instances", arr},
              {"skipped", m.skipped}};
}

inline Manifest manifest_from_json(const json& j) {
  Manifest m;
  m.master_seed = j.at("master_seed").get<std::uint64_t>();
  for (const auto& je : j.at("instances")) {
    InstanceEntry e;
    e.id = je.at("id").get<std::string>();
    e.file = je.at("file").get<std::string>();
    e.family = je.at("family").get<std::string>();
    e.n = je.at("n").get<int>();
    e.seed = je.at("seed").get<std::uint64_t>();
    e.edge_p = je.value("edge_p", -1.0);
    m.instances.push_back(e);
  }
  if (j.contains("skipped"))
    m.skipped = j.at("skipped").get<std::vector<std::string>>();
  return m;
}

/// Generates all instances with per-instance seeds derived from the
/// master seed and writes them plus manifest.json under out_dir.
/// Infeasible regular combinations (odd n*d) are skipped and logged.
inline Manifest generate_dataset(const DatasetSpec& spec,
                                 const std::filesystem::path& out_dir) {
  Manifest m;
  m.master_seed = spec.master_seed;
  std::filesystem::create_directories(out_dir / "instances");
  std::uint64_t counter = 0;
  for (const auto& family : spec.families) {
    int per = family == "complete"  ? spec.instances_complete
              : family == "regular" ? spec.instances_regular
                                    : spec.instances_random;
    for (int n : spec.sizes) {
      for (int i = 0; i < per; ++i) {
        std::uint64_t inst_seed = derive_seed(spec.master_seed, counter++);
        InstanceEntry e;
        e.family = family;
        e.n = n;
        e.seed = inst_seed;
        Graph g;
        if (family == "complete") {
          e.id = "complete-n" + std::to_string(n) + "-i" + std::to_string(i);
          g = generate_complete(n, 1.0);
        } else if (family == "regular") {
          if ((static_cast<long long>(n) * spec.regular_degree) % 2 != 0) {
            m.skipped.push_back("regular d=" + std::to_string(spec.regular_degree) +
                                " n=" + std::to_string(n) + ": odd n*d");
            continue;
          }
          e.id = "regular" + std::to_string(spec.regular_degree) + "-n" +
                 std::to_string(n) + "-i" + std::to_string(i);
          g = generate_regular(n, spec.regular_degree, inst_seed);
        } else {
          e.id = "random-n" + std::to_string(n) + "-i" + std::to_string(i);
          Rng rng(inst_seed);
          e.edge_p = rng.uniform(spec.edge_p_min, spec.edge_p_max);
          // Edgeless draws have no cut to approximate; redraw on a
          // derived stream so the dataset stays deterministic.
          for (std::uint64_t attempt = 1;; ++attempt) {
            g = generate_random(n, e.edge_p, derive_seed(inst_seed, attempt));
            if (g.n_edges() > 0) break;
          }
        }
        e.file = "instances/" + e.id + ".json";
        write_graph(out_dir / e.file, g);
        m.instances.push_back(e);
      }
    }
  }
  write_text_file(out_dir / "manifest.json", manifest_to_json(m).dump(2) + "\n");
  return m;
}

// ---------------------------------------------------------------------------
// Circuit depth metric

/// Greedy ASAP layering over primitive gates: gates on disjoint qubits
/// share a layer; a layer costs the max over its gates, with two-qubit
/// phase rotations at 3 (CNOT-RZ-CNOT) and everything else at 1.
inline long circuit_depth(const ParamCircuit& c) {
  struct Gate {
    int a, b;  // b = -1 for single-qubit
    int cost;
  };
  std::vector<Gate> gates;
  const auto& edges = c.graph->edges();
  for (const auto& op : c.ops) {
    switch (op.kind) {
      case OpKind::CostLayer:
      case OpKind::MultiCostLayer:
        for (const auto& e : edges) gates.push_back({e.u, e.v, 3});
        break;
      case OpKind::MixerLayer:
      case OpKind::MultiMixerLayer:
      case OpKind::WsMixerLayer:
      case OpKind::AbMixerLayer:
        for (int q = 0; q < c.n_qubits; ++q) gates.push_back({q, -1, 1});
        break;
      case OpKind::PathZZLayer:
        for (int q = 0; q + 1 < c.n_qubits; ++q) gates.push_back({q, q + 1, 3});
        break;
      case OpKind::ModifiedCostLayer:
        for (const auto& e : edges) {
          gates.push_back({e.u, -1, 1});
          gates.push_back({e.u, e.v, 1});
          gates.push_back({e.u, -1, 1});
          gates.push_back({e.u, e.v, 1});
        }
        break;
    }
  }
  std::vector<int> frontier(c.n_qubits, -1);
  std::vector<int> layer_cost;
  for (const auto& g : gates) {
    int layer = frontier[g.a] + 1;
    if (g.b >= 0) layer = std::max(layer, frontier[g.b] + 1);
    if (layer >= static_cast<int>(layer_cost.size()))
      layer_cost.resize(layer + 1, 0);
    layer_cost[layer] = std::max(layer_cost[layer], g.cost);
    frontier[g.a] = layer;
    if (g.b >= 0) frontier[g.b] = layer;
  }
  long depth = 0;
  for (int cost : layer_cost) depth += cost;
  return depth;
}

// ---------------------------------------------------------------------------
// Records

struct RunRecord {
  std::string instance_id;
  std::string variant;
  std::string family;
  int n = 0;
  int p = 0;
  std::uint64_t seed = 0;
  std::vector<double> init_params;
  std::vector<double> final_params;
  double best_value = 0.0;
  double alpha_exp = 0.0;
  double alpha_best = std::nan("");  // only with sampling enabled
  double c_max = 0.0;
  long iterations = 0;
  long circuit_calls = 0;
  long depth_metric = 0;
  double cos_sim = std::nan("");
  double wall_ms = 0.0;
  std::string status = "ok";
};

inline double cosine_similarity(const std::vector<double>& u,
                                const std::vector<double>& v) {
  if (u.size() != v.size() || u.empty()) return std::nan("");
  double dot = 0, nu = 0, nv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) return std::nan("");
  return dot / std::sqrt(nu * nv);
}

inline const char* records_csv_header() {
  return "variant,family,n,p,seed,alpha_exp,alpha_best,best_value,c_max,"
         "iterations,circuit_calls,circuit_depth,composite_depth,cos_sim,"
         "wall_ms,status";
}

inline std::string record_to_csv_line(const RunRecord& r) {
  std::string s;
  s += r.variant + "," + r.family + "," + std::to_string(r.n) + "," +
       std::to_string(r.p) + "," + std::to_string(r.seed) + ",";
  s += format_double(r.alpha_exp) + "," + format_double(r.alpha_best) + "," +
       format_double(r.best_value) + "," + format_double(r.c_max) + ",";
  s += std::to_string(r.iterations) + "," + std::to_string(r.circuit_calls) +
       "," + std::to_string(r.depth_metric) + ",";
  s += format_double(double(r.depth_metric) * double(r.circuit_calls)) + ",";
  s += format_double(r.cos_sim) + "," + format_double(r.wall_ms) + ",";
  s += r.status;
  return s;
}

inline void write_records_csv(const std::filesystem::path& path,
                              const std::vector<RunRecord>& records) {
  std::string text = records_csv_header();
  text += "\n";
  for (const auto& r : records) text += record_to_csv_line(r) + "\n";
  write_text_file(path, text);
}

/// Summary row as stored in records.csv (the per-cell JSON keeps the
/// parameter vectors).
struct CsvRow {
  std::string variant, family;
  int n = 0, p = 0;
  std::uint64_t seed = 0;
  double alpha_exp = 0, alpha_best = 0, best_value = 0, c_max = 0;
  long iterations = 0, circuit_calls = 0, circuit_depth = 0;
  double composite_depth = 0, cos_sim = 0, wall_ms = 0;
  std::string status;
};

inline std::vector<CsvRow> parse_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty records file " + path.string());
  if (line != records_csv_header())
    throw std::runtime_error("unexpected records header in " + path.string());
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 16)
      throw std::runtime_error("malformed records row: " + line);
    CsvRow r;
    r.variant = f[0];
    r.family = f[1];
    r.n = std::stoi(f[2]);
    r.p = std::stoi(f[3]);
    r.seed = std::stoull(f[4]);
    r.alpha_exp = std::strtod(f[5].c_str(), nullptr);
    r.alpha_best = std::strtod(f[6].c_str(), nullptr);
    r.best_value = std::strtod(f[7].c_str(), nullptr);
    r.c_max = std::strtod(f[8].c_str(), nullptr);
    r.iterations = std::stol(f[9]);
    r.circuit_calls = std::stol(f[10]);
    r.circuit_depth = std::stol(f[11]);
    r.composite_depth = std::strtod(f[12].c_str(), nullptr);
    r.cos_sim = std::strtod(f[13].c_str(), nullptr);
    r.wall_ms = std::strtod(f[14].c_str(), nullptr);
    r.status = f[15];
    rows.push_back(r);
  }
  return rows;
}

inline CsvRow record_to_row(const RunRecord& r) {
  CsvRow row;
  row.variant = r.variant;
  row.family = r.family;
  row.n = r.n;
  row.p = r.p;
  row.seed = r.seed;
  row.alpha_exp = r.alpha_exp;
  row.alpha_best = r.alpha_best;
  row.best_value = r.best_value;
  row.c_max = r.c_max;
  row.iterations = r.iterations;
  row.circuit_calls = r.circuit_calls;
  row.circuit_depth = r.depth_metric;
  row.composite_depth = double(r.depth_metric) * double(r.circuit_calls);
  row.cos_sim = r.cos_sim;
  row.wall_ms = r.wall_ms;
  row.status = r.status;
  return row;
}

}  // namespace qaoalab
