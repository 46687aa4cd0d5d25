#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coxsvrg/simulate.hpp"
#include "coxsvrg/solvers.hpp"

namespace coxsvrg {

// Bad or inconsistent configuration input (CLI exit code 1).
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A solve that was required to converge did not (CLI exit code 2).
class ConvergenceError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// lambda = 1/sqrt(n) (high) or 1/n (low) with n the number of observed
// failures, never the number of patients; alpha = 0 for ridge, 1 for lasso.
enum class PenaltyPreset { HighRidge, LowRidge, HighLasso, LowLasso };

ElasticNetPenalty resolve_preset(PenaltyPreset preset, const RiskSetIndex& idx);

// Content hash of (dataset bytes, penalty); keys the reference cache.
std::string dataset_fingerprint(const SurvivalDataset& data,
                                const ElasticNetPenalty& pen);

struct ReferenceOptimum {
  std::vector<double> theta_star;
  double f_star = 0.0;
  double residual = 0.0;  // unscaled fixed-point residual at theta_star
  std::string fingerprint;
  bool from_cache = false;
};

inline constexpr double kReferenceTol = 1e-10;

// High-precision optimum via fista at kReferenceTol. When cache_dir is given,
// a JSON file keyed by the fingerprint is reused on hit (no solver work) and
// written on miss. Throws ConvergenceError if the budget runs out first.
ReferenceOptimum compute_reference(const SurvivalDataset& data, const RiskSetIndex& idx,
                                   const ElasticNetPenalty& pen,
                                   const std::optional<std::filesystem::path>& cache_dir,
                                   std::uint64_t budget = kUnlimited);

struct SolverEntry {
  std::string name;       // trace/plot label, [A-Za-z0-9_.-]+
  std::string algorithm;  // fista | svrg_mb | two_svrg | hsvrg
  SolverConfig config;
  std::vector<double> gamma_grid;  // nonempty: a pilot run picks step_size
  double fista_tol = 1e-8;
};

struct RaceConfig {
  std::optional<std::filesystem::path> dataset_path;
  std::optional<SimulationConfig> simulation;
  std::optional<PenaltyPreset> preset;
  std::optional<std::pair<double, double>> penalty;  // lambda, alpha
  std::vector<SolverEntry> solvers;
  std::vector<std::uint64_t> seeds;
  std::uint64_t budget = 0;
  std::uint64_t pilot_budget = 0;      // 0: budget / 20
  std::uint64_t reference_budget = 0;  // 0: unlimited
  std::filesystem::path output_dir = ".";
  bool record_wall_time = true;
};

RaceConfig parse_race_config(const std::filesystem::path& path);

struct TraceRow {
  std::string solver;
  std::uint64_t seed = 0;
  std::uint64_t inner_products = 0;
  double objective = 0.0;
  double gap = 0.0;
  double seconds = 0.0;
  std::uint64_t phase = 0;
};

struct NamedTrace {
  std::string solver;
  std::uint64_t seed = 0;
  std::vector<TraceRow> rows;
};

void write_trace_csv(const NamedTrace& trace, const std::filesystem::path& path);
NamedTrace read_trace_csv(const std::filesystem::path& path);

struct RunRecord {
  std::string solver;
  std::uint64_t seed = 0;
  std::string status;  // completed | converged | budget_exhausted | error
  std::string message;
  double step_size = 0.0;
  std::uint64_t inner_products = 0;
  std::filesystem::path trace_file;
};

struct RaceOutcome {
  ReferenceOptimum reference;
  std::vector<RunRecord> runs;
  std::vector<NamedTrace> traces;
};

// Runs every (solver, seed) pair under the shared budget with a fresh ledger
// and rng each, writing one trace CSV and one status JSON per pair plus a
// summary. A failing run is recorded and the race continues.
RaceOutcome run_race(const RaceConfig& cfg);

// Self-contained SVG: log10 objective gap (clamped at 1e-12) against inner
// products, one curve per solver (median across seeds, per-seed curves shown
// faint when there are several).
void emit_plot(const std::vector<NamedTrace>& traces, const std::filesystem::path& path);

// Pilot: runs the entry briefly at every grid value with the given seed and
// returns the step size with the lowest final objective.
double pick_step_size(const SurvivalDataset& data, const RiskSetIndex& idx,
                      const ElasticNetPenalty& pen, const SolverEntry& entry,
                      std::uint64_t pilot_budget, std::uint64_t seed);

// Shared config helpers for the CLI.
SimulationConfig read_simulation_config(const std::filesystem::path& path,
                                        std::string* name_out = nullptr);

struct ReferenceRequest {
  std::optional<std::filesystem::path> dataset_path;
  std::optional<SimulationConfig> simulation;
  std::optional<PenaltyPreset> preset;
  std::optional<std::pair<double, double>> penalty;
};
ReferenceRequest read_reference_config(const std::filesystem::path& path);

struct AssessSpec {
  EstimatorKind kind = EstimatorKind::Nis;
  std::uint64_t iterations = 1;
};

struct AssessConfig {
  std::optional<std::filesystem::path> dataset_path;
  std::optional<SimulationConfig> simulation;
  std::vector<AssessSpec> estimators;
  std::uint64_t replicates = 1000;
  std::uint64_t seed = 0;
  std::optional<std::size_t> failure;  // default: the largest risk set
  std::vector<double> theta;           // empty: zeros
  std::vector<double> anchor;          // empty: zeros
};

AssessConfig read_assess_config(const std::filesystem::path& path);

struct AssessRow {
  std::string estimator;
  BiasVarianceReport report;
};

std::vector<AssessRow> run_assess(const AssessConfig& cfg);
void write_assess_csv(const std::vector<AssessRow>& rows,
                      const std::filesystem::path& path);

// Loads the dataset from exactly one of (path, simulation).
SurvivalDataset load_or_simulate(const std::optional<std::filesystem::path>& dataset_path,
                                 const std::optional<SimulationConfig>& simulation);

// Resolves exactly one of (preset, explicit lambda/alpha).
ElasticNetPenalty resolve_penalty(const std::optional<PenaltyPreset>& preset,
                                  const std::optional<std::pair<double, double>>& penalty,
                                  const RiskSetIndex& idx);

}  // namespace coxsvrg
