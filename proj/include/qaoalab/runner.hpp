#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qaoalab/bench.hpp"

namespace qaoalab {

namespace detail {

struct MultistartOutcome {
  OptResult best;           // winner's result
  std::vector<double> init; // winner's starting point
  long total_calls = 0;
  long total_iterations = 0;
};

inline MultistartOutcome multistart(const ParamCircuit& circ, const CostTable& ct,
                                    const ObjectiveSpec& objective,
                                    const std::vector<std::vector<double>>& starts,
                                    const OptimizerSpec& opt) {
  ObjectiveFn f = [&](const std::vector<double>& x) {
    return evaluate(circ, x, ct, objective);
  };
  MultistartOutcome out;
  bool first = true;
  for (const auto& x0 : starts) {
    OptResult res = maximize(f, x0, opt);
    out.total_calls += res.circuit_calls;
    out.total_iterations += res.iterations;
    if (first || res.best_value > out.best.best_value) {
      out.best = res;
      out.init = x0;
      first = false;
    }
  }
  return out;
}

inline std::vector<std::vector<double>> standard_starts(
    const ParamCircuit& circ, int p, const MultistartSpec& ms,
    std::uint64_t seed) {
  std::vector<std::vector<double>> starts;
  for (double dt : ms.tqa_dts) starts.push_back(init_tqa(p, dt));
  for (int r = 0; r < ms.random_starts; ++r)
    starts.push_back(init_random(circ.slot_kinds, derive_seed(seed, 100 + r)));
  return starts;
}

/// Counts objective evaluations consumed by one shift-rule gradient.
inline long shift_evals_per_gradient(const ParamCircuit& c) {
  long evals = 0;
  const long m = c.graph->n_edges();
  for (const auto& op : c.ops) {
    switch (op.kind) {
      case OpKind::CostLayer:
      case OpKind::MultiCostLayer:
        evals += 2 * m;
        break;
      case OpKind::MixerLayer:
      case OpKind::MultiMixerLayer:
      case OpKind::WsMixerLayer:
      case OpKind::AbMixerLayer:
        evals += 2 * c.n_qubits;
        break;
      case OpKind::PathZZLayer:
        evals += 2 * (c.n_qubits - 1);
        break;
      case OpKind::ModifiedCostLayer:
        evals += 2;  // central-difference fallback
        break;
    }
  }
  return evals;
}

}  // namespace detail

/// Trajectory-averaged exact expectation under per-gate depolarizing
/// noise; returns (mean, standard error of the mean).
inline std::pair<double, double> trajectory_average_expectation(
    const ParamCircuit& circ, const std::vector<double>& params,
    const CostTable& ct, double p_noise, int n_traj, std::uint64_t seed) {
  if (n_traj < 1)
    throw std::invalid_argument("trajectory_average: n_traj must be >= 1");
  NoiseSpec noise{p_noise};
  double sum = 0.0, sum_sq = 0.0;
  for (int t = 0; t < n_traj; ++t) {
    Rng rng(derive_seed(seed, t));
    StateVector s = run_circuit(circ, params, ct, &noise, &rng);
    double v = s.expectation_diagonal(ct);
    sum += v;
    sum_sq += v * v;
  }
  double mean = sum / n_traj;
  double var = std::max(0.0, sum_sq / n_traj - mean * mean);
  double se = n_traj > 1 ? std::sqrt(var / (n_traj - 1)) : 0.0;
  return {mean, se};
}

/// Runs one benchmark cell: init -> optimize -> final evaluation.
inline RunRecord run_single(const Graph& g, const std::string& family,
                            const std::string& instance_id,
                            const std::string& variant, int p,
                            std::uint64_t seed, const ExperimentConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  RunRecord r;
  r.instance_id = instance_id;
  r.variant = variant;
  r.family = family;
  r.n = g.n_vertices();
  r.p = p;
  r.seed = seed;

  CostTable ct = build_cost_table(g);
  r.c_max = brute_force_max(g).c_max;

  ParamCircuit final_circ;
  std::vector<double> final_params;
  std::vector<double> cos_ref;  // reference init for cosine similarity

  if (variant == "qaoa" || variant == "modified-qaoa" || variant == "ws-qaoa") {
    ParamCircuit circ;
    if (variant == "qaoa") {
      circ = build_standard(g, p);
    } else if (variant == "modified-qaoa") {
      circ = build_modified(g, p);
    } else {
      WsRelaxation rel = warm_start_relaxation(
          g, std::min(g.n_vertices(), cfg.ws.rank), cfg.ws.iters,
          derive_seed(seed, 7));
      circ = build_warm_start(g, p, rel.c, cfg.ws.eps);
    }
    auto starts = detail::standard_starts(circ, p, cfg.multistart, seed);
    auto out = detail::multistart(circ, ct, cfg.objective, starts, cfg.optimizer);
    r.init_params = out.init;
    r.best_value = out.best.best_value;
    r.iterations = out.total_iterations;
    r.circuit_calls = out.total_calls;
    final_circ = circ;
    final_params = out.best.final_params;
    cos_ref = out.init;
  } else if (variant == "ma-qaoa") {
    // Tie the multi-angle slots to the tuned standard optimum, then
    // refine; the seed evaluation is part of the incumbent trace, so the
    // result can only improve on the standard value.
    ParamCircuit std_circ = build_standard(g, p);
    auto starts = detail::standard_starts(std_circ, p, cfg.multistart, seed);
    auto std_out =
        detail::multistart(std_circ, ct, cfg.objective, starts, cfg.optimizer);
    ParamCircuit circ = build_multi_angle(g, p);
    const int m = g.n_edges();
    std::vector<double> seed_params(circ.n_params);
    for (int k = 0; k < p; ++k) {
      double gam = std_out.best.final_params[2 * k];
      double bet = std_out.best.final_params[2 * k + 1];
      int base = k * (m + g.n_vertices());
      for (int e = 0; e < m; ++e) seed_params[base + e] = gam;
      for (int q = 0; q < g.n_vertices(); ++q)
        seed_params[base + m + q] = bet;
    }
    long calls = std_out.total_calls;
    long iters = std_out.total_iterations;
    OptResult res;
    if (circ.n_params <= cfg.ma.nm_threshold) {
      auto out = detail::multistart(circ, ct, cfg.objective, {seed_params},
                                    cfg.optimizer);
      res = out.best;
      calls += out.total_calls;
      iters += out.total_iterations;
    } else {
      long grad_evals = detail::shift_evals_per_gradient(circ);
      long* calls_ptr = &calls;
      GradientFn grad = [&circ, &ct, calls_ptr,
                         grad_evals](const std::vector<double>& x) {
        *calls_ptr += grad_evals;
        return gradient(circ, x, ct, GradMode::ShiftRule).values;
      };
      ObjectiveFn f = [&](const std::vector<double>& x) {
        return evaluate(circ, x, ct, cfg.objective);
      };
      OptimizerSpec gd = cfg.optimizer;
      gd.method = OptMethod::GradientAscent;
      gd.max_iters = cfg.ma.gd_steps;
      gd.gd_step = cfg.ma.gd_step;
      res = maximize(f, seed_params, gd, grad);
      calls += res.circuit_calls;
      iters += res.iterations;
    }
    r.init_params = seed_params;
    r.best_value = res.best_value;
    r.iterations = iters;
    r.circuit_calls = calls;
    final_circ = circ;
    final_params = res.final_params;
    cos_ref = seed_params;
  } else if (variant == "qaoa-plus") {
    ParamCircuit base = build_standard(g, 1);
    auto base_starts = detail::standard_starts(base, 1, cfg.multistart, seed);
    auto base_out =
        detail::multistart(base, ct, cfg.objective, base_starts, cfg.optimizer);
    ParamCircuit circ = build_plus(g);
    std::vector<double> seed_params(circ.n_params, 0.0);
    seed_params[0] = base_out.best.final_params[0];
    seed_params[1] = base_out.best.final_params[1];
    std::vector<std::vector<double>> starts = {seed_params};
    for (int rs = 0; rs < cfg.multistart.random_starts; ++rs)
      starts.push_back(
          init_random(circ.slot_kinds, derive_seed(seed, 200 + rs)));
    auto out = detail::multistart(circ, ct, cfg.objective, starts, cfg.optimizer);
    r.init_params = out.init;
    r.best_value = out.best.best_value;
    r.iterations = base_out.total_iterations + out.total_iterations;
    r.circuit_calls = base_out.total_calls + out.total_calls;
    final_circ = circ;
    final_params = out.best.final_params;
    cos_ref = out.init;
  } else if (variant == "ab-qaoa") {
    std::vector<double> h(g.n_vertices(), 0.0);
    std::vector<double> params = init_tqa(p, 0.6);
    double best_value = -1e300;
    std::vector<double> best_params, best_h;
    ParamCircuit best_circ;
    long calls = 0, iters = 0;
    std::vector<double> first_init;
    for (int round = 0; round < cfg.ab.rounds; ++round) {
      ParamCircuit circ = build_adaptive_bias(g, p, h);
      std::vector<std::vector<double>> starts;
      if (round == 0) {
        starts = detail::standard_starts(circ, p, cfg.multistart, seed);
      } else {
        starts = {params};
      }
      auto out = detail::multistart(circ, ct, cfg.objective, starts, cfg.optimizer);
      calls += out.total_calls;
      iters += out.total_iterations;
      if (round == 0) first_init = out.init;
      params = out.best.final_params;
      if (out.best.best_value > best_value) {
        best_value = out.best.best_value;
        best_params = params;
        best_h = h;
        best_circ = circ;
      }
      StateVector s = run_circuit(circ, params, ct);
      h = update_bias(h, s.ising_z_expectations(), cfg.ab.ell);
    }
    r.init_params = first_init;
    r.best_value = best_value;
    r.iterations = iters;
    r.circuit_calls = calls;
    final_circ = best_circ;
    final_params = best_params;
    cos_ref = first_init;
  } else if (variant == "falqon") {
    // The recorded reference init is the zero-control schedule
    // (gamma_k = dt, beta_k = 0): similarity then measures how far the
    // feedback (and any polishing optimizer) moves the mixer angles.
    if (cfg.falqon.mode == "pure") {
      int layers = cfg.falqon.layer_scale * p;
      FalqonResult fr = falqon_run(g, layers, cfg.falqon.dt);
      final_circ = build_standard(g, layers);
      final_params.assign(2 * layers, 0.0);
      cos_ref.assign(2 * layers, 0.0);
      for (int k = 0; k < layers; ++k) {
        final_params[2 * k] = cfg.falqon.dt;
        final_params[2 * k + 1] = fr.betas[k] * cfg.falqon.dt;
        cos_ref[2 * k] = cfg.falqon.dt;
      }
      r.init_params = cos_ref;
      r.best_value = fr.trace.back();
      r.iterations = layers;
      r.circuit_calls = layers + 1;
    } else {
      std::vector<double> seed_params = falqon_plus_seed(g, p, cfg.falqon.dt);
      ParamCircuit circ = build_standard(g, p);
      auto out = detail::multistart(circ, ct, cfg.objective, {seed_params},
                                    cfg.optimizer);
      cos_ref.assign(2 * p, 0.0);
      for (int k = 0; k < p; ++k) cos_ref[2 * k] = cfg.falqon.dt;
      r.init_params = seed_params;
      r.best_value = out.best.best_value;
      r.iterations = out.total_iterations;
      r.circuit_calls = p + out.total_calls;
      final_circ = circ;
      final_params = out.best.final_params;
    }
  } else if (variant == "rqaoa") {
    RqaoaInnerSpec inner;
    inner.opt = cfg.optimizer;
    inner.p = p;
    inner.tqa_dts = cfg.multistart.tqa_dts;
    inner.random_starts = cfg.multistart.random_starts;
    RqaoaResult res = rqaoa_solve(g, cfg.rqaoa.cutoff, inner, seed);
    r.best_value = res.value;
    r.alpha_exp = res.value / r.c_max;
    r.alpha_best = r.alpha_exp;
    r.iterations = res.iterations;
    r.circuit_calls = std::max(1L, res.circuit_calls);
    r.depth_metric = circuit_depth(build_standard(g, p));
    auto t1 = std::chrono::steady_clock::now();
    r.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return r;
  } else {
    throw std::invalid_argument("run_single: unknown variant " + variant);
  }

  r.final_params = final_params;
  r.depth_metric = circuit_depth(final_circ);
  r.cos_sim = cosine_similarity(cos_ref, final_params);

  StateVector s = run_circuit(final_circ, final_params, ct);
  double f_exp;
  if (cfg.noise > 0.0) {
    auto [mean, se] =
        trajectory_average_expectation(final_circ, final_params, ct, cfg.noise,
                                       cfg.noise_trajectories,
                                       derive_seed(seed, 31));
    (void)se;
    f_exp = mean;
  } else {
    f_exp = s.expectation_diagonal(ct);
  }
  r.alpha_exp = approx_ratio_expectation(f_exp, r.c_max);
  if (cfg.shots > 0) {
    auto hist = s.sample(cfg.shots, derive_seed(seed, 32));
    r.alpha_best = approx_ratio_best_sampled(hist, g, r.c_max);
  }

  auto t1 = std::chrono::steady_clock::now();
  r.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return r;
}

// ---------------------------------------------------------------------------
// Sweep execution

inline json record_to_json(const RunRecord& r) {
  return json{{"instance_id", r.instance_id},
              {"variant", r.variant},
              {"family", r.family},
              {"n", r.n},
              {"p", r.p},
              {"seed", r.seed},
              {"init_params", r.init_params},
              {"final_params", r.final_params},
              {"best_value", r.best_value},
              {"alpha_exp", r.alpha_exp},
              {"alpha_best", r.alpha_best},
              {"c_max", r.c_max},
              {"iterations", r.iterations},
              {"circuit_calls", r.circuit_calls},
              {"circuit_depth", r.depth_metric},
              {"cos_sim", r.cos_sim},
              {"wall_ms", r.wall_ms},
              {"status", r.status}};
}

inline RunRecord record_from_json(const json& j) {
  RunRecord r;
  r.instance_id = j.at("instance_id").get<std::string>();
  r.variant = j.at("variant").get<std::string>();
  r.family = j.at("family").get<std::string>();
  r.n = j.at("n").get<int>();
  r.p = j.at("p").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.init_params = j.at("init_params").get<std::vector<double>>();
  r.final_params = j.at("final_params").get<std::vector<double>>();
  r.best_value = j.at("best_value").get<double>();
  r.alpha_exp = j.at("alpha_exp").get<double>();
  r.alpha_best = j.value("alpha_best", std::nan(""));
  r.c_max = j.at("c_max").get<double>();
  r.iterations = j.at("iterations").get<long>();
  r.circuit_calls = j.at("circuit_calls").get<long>();
  r.depth_metric = j.at("circuit_depth").get<long>();
  r.cos_sim = j.value("cos_sim", std::nan(""));
  r.wall_ms = j.at("wall_ms").get<double>();
  r.status = j.at("status").get<std::string>();
  return r;
}

/// Full factorial (instance x variant x depth x repetition). Cells whose
/// JSON already exists under out_dir/cells are reused, which makes
/// interrupted sweeps resumable. Per-cell failures become failed rows.
inline std::vector<RunRecord> run_experiment(
    const ExperimentConfig& cfg, const Manifest& manifest,
    const std::filesystem::path& data_dir,
    const std::filesystem::path& out_dir, int jobs = 1, bool resume = false) {
  struct Cell {
    const InstanceEntry* inst;
    std::string variant;
    int p;
    int rep;
    std::uint64_t seed;
    std::string id;
  };
  std::vector<Cell> cells;
  std::uint64_t counter = 0;
  for (const auto& inst : manifest.instances)
    for (const auto& variant : cfg.variants)
      for (int p : cfg.depths)
        for (int rep = 0; rep < cfg.repetitions; ++rep) {
          Cell c{&inst, variant, p, rep,
                 derive_seed(manifest.master_seed, 0xce11 + counter), ""};
          c.id = inst.id + "-" + variant + "-p" + std::to_string(p) + "-r" +
                 std::to_string(rep);
          ++counter;
          cells.push_back(std::move(c));
        }

  std::filesystem::create_directories(out_dir / "cells");
  std::vector<RunRecord> records(cells.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const Cell& cell = cells[i];
      auto cell_path = out_dir / "cells" / (cell.id + ".json");
      if (resume && std::filesystem::exists(cell_path)) {
        records[i] = record_from_json(read_json_file(cell_path));
        continue;
      }
      RunRecord rec;
      try {
        Graph g = read_graph(data_dir / cell.inst->file);
        rec = run_single(g, cell.inst->family, cell.inst->id, cell.variant,
                         cell.p, cell.seed, cfg);
      } catch (const std::exception& ex) {
        rec = RunRecord{};
        rec.instance_id = cell.inst->id;
        rec.variant = cell.variant;
        rec.family = cell.inst->family;
        rec.n = cell.inst->n;
        rec.p = cell.p;
        rec.seed = cell.seed;
        rec.status = std::string("failed:") + ex.what();
      }
      write_text_file(cell_path, record_to_json(rec).dump(2) + "\n");
      records[i] = rec;
    }
  };
  jobs = std::max(1, jobs);
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs - 1; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  write_records_csv(out_dir / "records.csv", records);
  write_text_file(out_dir / "metadata.json", config_to_json(cfg).dump(2) + "\n");
  return records;
}

// ---------------------------------------------------------------------------
// Aggregation and emission

struct GroupStat {
  double mean = 0, stddev = 0, min = 0, max = 0;
  long count = 0;
};

struct AggregateReport {
  std::map<std::string, GroupStat> alpha_by_variant_family;  // "variant|family"
  std::map<std::string, GroupStat> alpha_by_variant_n;       // "variant|n"
  std::map<std::string, GroupStat> alpha_by_variant_p;       // "variant|p"
  std::map<std::string, GroupStat> cos_by_variant;
  std::map<std::string, GroupStat> composite_by_variant;
  long excluded_cos_rows = 0;
};

namespace detail {

inline GroupStat stat_of(const std::vector<double>& xs) {
  GroupStat s;
  s.count = static_cast<long>(xs.size());
  if (xs.empty()) return s;
  s.min = s.max = xs[0];
  double sum = 0;
  for (double x : xs) {
    sum += x;
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
  }
  s.mean = sum / double(xs.size());
  double var = 0;
  for (double x : xs) var += (x - s.mean) * (x - s.mean);
  s.stddev = xs.size() > 1 ? std::sqrt(var / double(xs.size() - 1)) : 0.0;
  return s;
}

}  // namespace detail

inline AggregateReport aggregate(const std::vector<CsvRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("aggregate: no records");
  std::map<std::string, std::vector<double>> af, an, ap, cs, cd;
  AggregateReport rep;
  for (const auto& r : rows) {
    if (r.status != "ok") continue;
    af[r.variant + "|" + r.family].push_back(r.alpha_exp);
    an[r.variant + "|" + std::to_string(r.n)].push_back(r.alpha_exp);
    ap[r.variant + "|" + std::to_string(r.p)].push_back(r.alpha_exp);
    cd[r.variant].push_back(r.composite_depth);
    if (std::isnan(r.cos_sim)) {
      ++rep.excluded_cos_rows;
    } else {
      cs[r.variant].push_back(r.cos_sim);
    }
  }
  for (auto& [k, v] : af) rep.alpha_by_variant_family[k] = detail::stat_of(v);
  for (auto& [k, v] : an) rep.alpha_by_variant_n[k] = detail::stat_of(v);
  for (auto& [k, v] : ap) rep.alpha_by_variant_p[k] = detail::stat_of(v);
  for (auto& [k, v] : cs) rep.cos_by_variant[k] = detail::stat_of(v);
  for (auto& [k, v] : cd) rep.composite_by_variant[k] = detail::stat_of(v);
  return rep;
}

inline json report_to_json(const AggregateReport& rep) {
  auto dump_group = [](const std::map<std::string, GroupStat>& m) {
    json j = json::object();
    for (const auto& [k, s] : m)
      j[k] = {{"mean", s.mean},
              {"stddev", s.stddev},
              {"min", s.min},
              {"max", s.max},
              {"count", s.count}};
    return j;
  };
  return json{{"alpha_by_variant_family", dump_group(rep.alpha_by_variant_family)},
              {"alpha_by_variant_n", dump_group(rep.alpha_by_variant_n)},
              {"alpha_by_variant_p", dump_group(rep.alpha_by_variant_p)},
              {"cos_by_variant", dump_group(rep.cos_by_variant)},
              {"composite_by_variant", dump_group(rep.composite_by_variant)},
              {"excluded_cos_rows", rep.excluded_cos_rows}};
}

/// Writes report.json plus plot-series files (series,x,y rows) shaped
/// like the headline comparison figures: ratio by family, ratio by size
/// per family, and composite depth by size.
inline void emit_report(const AggregateReport& rep,
                        const std::vector<CsvRow>& rows,
                        const std::filesystem::path& out_dir,
                        const std::set<std::string>& formats = {"json",
                                                                "plots"}) {
  if (formats.count("json"))
    write_text_file(out_dir / "report.json", report_to_json(rep).dump(2) + "\n");
  if (!formats.count("plots")) return;

  auto series_csv = [](const std::map<std::string, std::map<double, std::vector<double>>>&
                           series) {
    std::string text = "series,x,y\n";
    for (const auto& [name, pts] : series)
      for (const auto& [x, ys] : pts) {
        double mean = 0;
        for (double y : ys) mean += y;
        mean /= double(ys.size());
        text += name + "," + format_double(x) + "," + format_double(mean) + "\n";
      }
    return text;
  };

  std::map<std::string, std::map<double, std::vector<double>>> fig6, fig7, fig8;
  std::map<std::string, int> family_x = {{"complete", 0}, {"regular", 1},
                                         {"random", 2}};
  for (const auto& r : rows) {
    if (r.status != "ok") continue;
    fig6[r.variant][family_x[r.family]].push_back(r.alpha_exp);
    fig7[r.variant + "/" + r.family][r.n].push_back(r.alpha_exp);
    fig8[r.variant][r.n].push_back(r.composite_depth);
  }
  write_text_file(out_dir / "plots" / "fig_ratio_by_family.csv", series_csv(fig6));
  write_text_file(out_dir / "plots" / "fig_ratio_by_size.csv", series_csv(fig7));
  write_text_file(out_dir / "plots" / "fig_composite_depth.csv", series_csv(fig8));
}

}  // namespace qaoalab
