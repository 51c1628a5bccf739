#pragma once

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qaoalab/baselines.hpp"
#include "qaoalab/runner.hpp"

namespace qaoalab::cli {

inline ExperimentConfig load_config(const std::string& path) {
  return parse_config(read_json_file(path));
}

inline int cmd_gen(const std::string& config_path, const std::string& out_dir) {
  ExperimentConfig cfg = config_path.empty()
                             ? ExperimentConfig{}
                             : load_config(config_path);
  Manifest m = generate_dataset(cfg.dataset, out_dir);
  std::cout << "wrote " << m.instances.size() << " instances to " << out_dir
            << " (manifest.json";
  if (!m.skipped.empty()) std::cout << ", " << m.skipped.size() << " skipped";
  std::cout << ")\n";
  return 0;
}

inline int cmd_solve(const std::string& instance_path,
                     const std::string& variant, int p, std::uint64_t seed,
                     const std::string& config_path) {
  ExperimentConfig cfg = config_path.empty()
                             ? ExperimentConfig{}
                             : load_config(config_path);
  Graph g = read_graph(instance_path);
  RunRecord r = run_single(g, "adhoc",
                           std::filesystem::path(instance_path).stem().string(),
                           variant, p, seed, cfg);
  std::printf("instance : %s (n=%d, m=%d)\n", r.instance_id.c_str(), r.n,
              g.n_edges());
  std::printf("variant  : %s  p=%d  seed=%llu\n", r.variant.c_str(), r.p,
              static_cast<unsigned long long>(r.seed));
  std::printf("c_max    : %s\n", format_double(r.c_max).c_str());
  std::printf("value    : %s\n", format_double(r.best_value).c_str());
  std::printf("alpha    : %.3f\n", r.alpha_exp);
  std::printf("calls    : %ld  (depth metric %ld)\n", r.circuit_calls,
              r.depth_metric);
  return 0;
}

inline int cmd_sweep(const std::string& config_path, const std::string& out_dir,
                     bool resume, int jobs) {
  ExperimentConfig cfg = load_config(config_path);
  Manifest m = generate_dataset(cfg.dataset, out_dir);
  auto records = run_experiment(cfg, m, out_dir, out_dir, jobs, resume);
  long failed = 0;
  for (const auto& r : records)
    if (r.status != "ok") ++failed;
  std::cout << records.size() << " records written to " << out_dir
            << "/records.csv";
  if (failed) std::cout << " (" << failed << " failed rows)";
  std::cout << "\n";
  return failed == 0 ? 0 : 2;
}

inline int cmd_report(const std::string& records_path,
                      const std::string& out_dir,
                      const std::string& formats_arg) {
  auto rows = parse_records_csv(records_path);
  AggregateReport rep = aggregate(rows);
  std::set<std::string> formats;
  std::stringstream ss(formats_arg);
  std::string f;
  while (std::getline(ss, f, ',')) formats.insert(f);
  emit_report(rep, rows, out_dir, formats);
  std::cout << "report for " << rows.size() << " records written to " << out_dir
            << "\n";
  return 0;
}

inline int cmd_baselines(const std::string& instance_path,
                         const std::string& solvers_arg, std::uint64_t seed) {
  Graph g = read_graph(instance_path);
  std::vector<std::string> solvers;
  std::stringstream ss(solvers_arg);
  std::string s;
  while (std::getline(ss, s, ',')) solvers.push_back(s);
  const std::set<std::string> known = {"brute", "greedy", "local",
                                       "anneal", "spectral", "gw"};
  for (const auto& name : solvers)
    if (!known.count(name))
      throw CLI::ValidationError("baselines", "unknown solver: " + name);

  std::printf("%-10s %12s\n", "solver", "value");
  for (const auto& name : solvers) {
    double value = 0.0;
    if (name == "brute") {
      value = brute_force_max(g).c_max;
    } else if (name == "greedy") {
      value = greedy_cut(g).value;
    } else if (name == "local") {
      value = local_search(g, BitString(g.n_vertices(), 0)).value;
    } else if (name == "anneal") {
      value = simulated_annealing(g, SaSchedule{}, seed).value;
    } else if (name == "spectral") {
      value = spectral_cut(g).value;
    } else {
      value = gw_cut(g, std::min(g.n_vertices(), 8), 300, 100, seed).value;
    }
    std::printf("%-10s %12s\n", name.c_str(), format_double(value).c_str());
  }
  return 0;
}

/// Parses argv and dispatches. Exit codes: 0 success, 1 usage error,
/// 2 runtime failure.
inline int run(const std::vector<std::string>& args) {
  CLI::App app{"QAOA variants laboratory: datasets, solves, sweeps, reports"};
  app.require_subcommand(1);

  std::string config_path, out_dir, instance_path, variant = "qaoa";
  std::string records_path, formats = "json,plots", solvers = "brute,greedy,gw";
  int p = 1, jobs = 1;
  std::uint64_t seed = 1;
  bool resume = false;

  auto* gen = app.add_subcommand("gen", "Generate a benchmark dataset");
  gen->add_option("--config", config_path, "Experiment config (JSON)");
  gen->add_option("--out", out_dir, "Output directory")->required();

  auto* solve = app.add_subcommand("solve", "Solve one instance with one variant");
  solve->add_option("--instance", instance_path, "Instance file (JSON)")
      ->required();
  solve->add_option("--variant", variant,
                    "qaoa|ma-qaoa|qaoa-plus|modified-qaoa|ws-qaoa|ab-qaoa|"
                    "falqon|rqaoa");
  solve->add_option("--p", p, "Circuit depth (default 1)");
  solve->add_option("--seed", seed, "Run seed (default 1)");
  solve->add_option("--config", config_path, "Optional config for defaults");

  auto* sweep = app.add_subcommand("sweep", "Run the full benchmark sweep");
  sweep->add_option("--config", config_path, "Experiment config (JSON)")
      ->required();
  sweep->add_option("--out", out_dir, "Output directory")->required();
  sweep->add_flag("--resume", resume, "Reuse finished cells from out dir");
  sweep->add_option("--jobs", jobs, "Parallel workers (default 1)");

  auto* report = app.add_subcommand("report", "Aggregate a records.csv");
  report->add_option("--records", records_path, "records.csv path")->required();
  report->add_option("--out", out_dir, "Output directory")->required();
  report->add_option("--formats", formats, "Comma list: json,plots");

  auto* base = app.add_subcommand("baselines", "Run classical solvers");
  base->add_option("--instance", instance_path, "Instance file (JSON)")
      ->required();
  base->add_option("--solvers", solvers,
                   "Comma list: brute,greedy,local,anneal,spectral,gw");
  base->add_option("--seed", seed, "Solver seed (default 1)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) return cmd_gen(config_path, out_dir);
    if (solve->parsed()) {
      if (!is_known_variant(variant)) {
        std::cerr << "unknown variant: " << variant << "\n";
        return 1;
      }
      return cmd_solve(instance_path, variant, p, seed, config_path);
    }
    if (sweep->parsed()) return cmd_sweep(config_path, out_dir, resume, jobs);
    if (report->parsed()) return cmd_report(records_path, out_dir, formats);
    if (base->parsed()) return cmd_baselines(instance_path, solvers, seed);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace qaoalab::cli
