// coxbench: simulate survival data, compute reference optima, race solvers
// under a shared inner-product budget, plot traces, and assess estimators.
//
// Exit codes: 0 success, 1 bad configuration or usage, 2 a required solve
// failed to converge.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "coxsvrg/bench.hpp"
#include "coxsvrg/cox_model.hpp"
#include "coxsvrg/penalty.hpp"

namespace fs = std::filesystem;
using namespace coxsvrg;

namespace {

int cmd_simulate(const fs::path& config, const fs::path& out_dir, bool seed_set,
                 std::uint64_t seed) {
  std::string name = "dataset";
  SimulationConfig cfg = read_simulation_config(config, &name);
  if (seed_set) cfg.seed = seed;

  SurvivalDataset data = simulate_dataset(cfg);
  fs::create_directories(out_dir);
  const fs::path csv = out_dir / (name + ".csv");
  write_dataset_csv(data, csv);
  const double realized =
      1.0 - static_cast<double>(data.n_events()) / static_cast<double>(data.n_patients());
  write_simulation_metadata(cfg, realized, data.n_events(),
                            out_dir / (name + ".meta.json"));

  std::printf("wrote %s (%zu rows, %zu events, realized censoring %.3f)\n",
              csv.generic_string().c_str(), data.n_patients(), data.n_events(), realized);
  return 0;
}

int cmd_reference(const fs::path& config, const fs::path& out_dir, std::uint64_t budget) {
  ReferenceRequest req = read_reference_config(config);
  SurvivalDataset data = load_or_simulate(req.dataset_path, req.simulation);
  RiskSetIndex idx = build_risk_index(data);
  ElasticNetPenalty pen = resolve_penalty(req.preset, req.penalty, idx);

  fs::create_directories(out_dir);
  ReferenceOptimum ref = compute_reference(data, idx, pen, out_dir,
                                           budget == 0 ? kUnlimited : budget);
  std::printf("f* = %.17g  residual %.3g  fingerprint %s%s\n", ref.f_star, ref.residual,
              ref.fingerprint.c_str(), ref.from_cache ? "  (cached)" : "");
  return 0;
}

int cmd_race(const fs::path& config, const std::string& out_override,
             std::uint64_t budget_override) {
  RaceConfig cfg = parse_race_config(config);
  if (!out_override.empty()) cfg.output_dir = out_override;
  if (budget_override != 0) cfg.budget = budget_override;

  RaceOutcome out = run_race(cfg);
  std::printf("reference f* = %.17g%s\n", out.reference.f_star,
              out.reference.from_cache ? "  (cached)" : "");
  for (const RunRecord& r : out.runs) {
    if (r.status == "error")
      std::printf("  %-20s s%-4llu error: %s\n", r.solver.c_str(),
                  static_cast<unsigned long long>(r.seed), r.message.c_str());
    else
      std::printf("  %-20s s%-4llu %-16s %12llu products\n", r.solver.c_str(),
                  static_cast<unsigned long long>(r.seed), r.status.c_str(),
                  static_cast<unsigned long long>(r.inner_products));
  }
  std::printf("wrote %s\n", (cfg.output_dir / "race_summary.json").generic_string().c_str());
  return 0;
}

int cmd_plot(const std::vector<std::string>& trace_files, const fs::path& out) {
  std::vector<NamedTrace> traces;
  traces.reserve(trace_files.size());
  for (const std::string& f : trace_files) traces.push_back(read_trace_csv(f));
  emit_plot(traces, out);
  std::printf("wrote %s\n", out.generic_string().c_str());
  return 0;
}

int cmd_assess(const fs::path& config, const fs::path& out) {
  AssessConfig cfg = read_assess_config(config);
  std::vector<AssessRow> rows = run_assess(cfg);
  write_assess_csv(rows, out);
  std::printf("%-13s %10s %10s %14s %14s\n", "estimator", "iterations", "replicates",
              "bias_norm", "mse");
  for (const AssessRow& r : rows)
    std::printf("%-13s %10llu %10llu %14.6g %14.6g\n", r.estimator.c_str(),
                static_cast<unsigned long long>(r.report.iterations),
                static_cast<unsigned long long>(r.report.replicates),
                r.report.mean_bias_norm, r.report.mean_squared_error);
  std::printf("wrote %s\n", out.generic_string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"penalized Cox partial-likelihood solver benchmarks"};
  app.require_subcommand(1);

  std::string config, out_dir = ".", out_file;
  std::uint64_t seed = 0, budget = 0;
  std::vector<std::string> trace_files;

  CLI::App* sim = app.add_subcommand("simulate", "generate a synthetic survival dataset");
  sim->add_option("--config", config, "simulation config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  sim->add_option("--out", out_dir, "output directory");
  CLI::Option* seed_opt = sim->add_option("--seed", seed, "override the config seed");

  CLI::App* ref = app.add_subcommand("reference", "solve for a high-precision optimum");
  ref->add_option("--config", config, "reference config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  ref->add_option("--out", out_dir, "cache directory");
  ref->add_option("--budget", budget, "inner-product cap (0 = unlimited)");

  CLI::App* race = app.add_subcommand("race", "run solvers under a shared budget");
  race->add_option("--config", config, "race config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  race->add_option("--out", out_file, "override the config output directory");
  race->add_option("--budget", budget, "override the config budget");

  CLI::App* plot = app.add_subcommand("plot", "render trace CSVs to an SVG");
  plot->add_option("traces", trace_files, "trace CSV files")
      ->required()
      ->check(CLI::ExistingFile);
  plot->add_option("--out", out_file, "output SVG path")->required();

  CLI::App* assess = app.add_subcommand("assess", "estimator bias/variance study");
  assess->add_option("--config", config, "assess config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  assess->add_option("--out", out_file, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (sim->parsed()) return cmd_simulate(config, out_dir, seed_opt->count() > 0, seed);
    if (ref->parsed()) return cmd_reference(config, out_dir, budget);
    if (race->parsed()) return cmd_race(config, out_file, budget);
    if (plot->parsed()) return cmd_plot(trace_files, out_file);
    if (assess->parsed())
      return cmd_assess(config, out_file.empty() ? "assess.csv" : out_file);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
