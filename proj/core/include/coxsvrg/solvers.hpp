#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "coxsvrg/estimators.hpp"
#include "coxsvrg/penalty.hpp"
#include "coxsvrg/schedule.hpp"

namespace coxsvrg {

inline constexpr std::uint64_t kUnlimited = std::numeric_limits<std::uint64_t>::max();

enum class SolveStatus { Converged, Completed, BudgetExhausted };

struct TraceCheckpoint {
  std::uint64_t inner_products = 0;
  double objective = 0.0;
  double elapsed_seconds = 0.0;
  std::uint64_t phase = 0;
};

// Checkpoints with strictly increasing inner_products. Objective values along
// the trace are evaluated on a side ledger and never count toward the
// solver's own budget.
struct ConvergenceTrace {
  std::vector<TraceCheckpoint> checkpoints;
};

struct SolverConfig {
  std::uint64_t phases = 1;         // K
  std::uint64_t phase_length = 1;   // m, inner iterations of an MCMC phase
  double step_size = 1e-3;          // gamma
  std::uint64_t switch_phase = 0;   // K_S: phases 1..K_S run the MCMC loop,
                                    // later ones the minibatch loop
  std::uint64_t minibatch_size = 1; // n_mb, failures per minibatch draw
  ScheduleSpec schedule = ScheduleSpec::practical();
  EstimatorKind estimator = EstimatorKind::Nis;
  std::uint64_t seed = 0;
  std::uint64_t checkpoint_every = 0;  // extra checkpoints every this many
                                       // inner steps; 0 = phase ends only
};

struct SolveResult {
  std::vector<double> theta;
  ConvergenceTrace trace;
  // Phase averages, one entry per completed phase.
  std::vector<std::vector<double>> phase_iterates;
  SolveStatus status = SolveStatus::Completed;
  // Unscaled fixed-point residual |theta - prox(theta - gamma grad f(theta))|
  // at the returned point; filled by fista only.
  double residual = std::numeric_limits<double>::quiet_NaN();
};

// Replaceable inner-gradient estimate for the MCMC phases; used by tests to
// run the phase engine with exact gradients. Must return an estimate of
// failure f's subfunction gradient at theta and charge the ledger for
// whatever it computes.
using InnerEstimator = std::function<std::vector<double>(
    std::size_t f, std::span<const double> theta, std::uint64_t iterations,
    const PhaseCache& cache, Rng& rng, InnerProductLedger& ledger)>;

// Accelerated proximal gradient with halving backtracking on the quadratic
// upper bound; every likelihood evaluation inside the search is charged.
// Stops when the gradient-mapping norm |theta - prox(theta - g grad)| / g
// falls to tol (checked at the iterate, after a cheap trigger), or when
// max_inner_products is exhausted.
SolveResult fista(const SurvivalDataset& data, const RiskSetIndex& idx,
                  const ElasticNetPenalty& pen, std::span<const double> theta0,
                  double tol, std::uint64_t max_inner_products,
                  InnerProductLedger& ledger);

// Hybrid doubly stochastic solver: each phase opens with one anchor pass
// (n_active products) that caches the full gradient and every subfunction
// gradient; phases 1..switch_phase then run `phase_length` variance-reduced
// steps whose stochastic part is an MCMC estimate with the per-phase
// iteration schedule, and the remaining phases run
// max(1, (phase_length-1)/minibatch_size) steps on minibatches drawn without
// replacement. The phase iterate is the average over the phase's steps.
// When the schedule asks for at least risk_size(f) estimator iterations the
// exact subfunction gradient is used instead (same contract, never more
// expensive, zero estimator error).
SolveResult hsvrg(const SurvivalDataset& data, const RiskSetIndex& idx,
                  const ElasticNetPenalty& pen, const SolverConfig& cfg,
                  std::span<const double> theta0, InnerProductLedger& ledger,
                  std::uint64_t budget = kUnlimited);
SolveResult hsvrg(const SurvivalDataset& data, const RiskSetIndex& idx,
                  const ElasticNetPenalty& pen, const SolverConfig& cfg,
                  std::span<const double> theta0, InnerProductLedger& ledger,
                  std::uint64_t budget, const InnerEstimator& estimator);

// All phases MCMC (switch_phase forced to phases).
SolveResult two_svrg(const SurvivalDataset& data, const RiskSetIndex& idx,
                     const ElasticNetPenalty& pen, const SolverConfig& cfg,
                     std::span<const double> theta0, InnerProductLedger& ledger,
                     std::uint64_t budget = kUnlimited);
SolveResult two_svrg(const SurvivalDataset& data, const RiskSetIndex& idx,
                     const ElasticNetPenalty& pen, const SolverConfig& cfg,
                     std::span<const double> theta0, InnerProductLedger& ledger,
                     std::uint64_t budget, const InnerEstimator& estimator);

// All phases minibatch (switch_phase forced to 0).
SolveResult prox_svrg_minibatch(const SurvivalDataset& data, const RiskSetIndex& idx,
                                const ElasticNetPenalty& pen, const SolverConfig& cfg,
                                std::span<const double> theta0,
                                InnerProductLedger& ledger,
                                std::uint64_t budget = kUnlimited);

// Mean of the first `phases` phase iterates (the rate object for the convex,
// non-strongly-convex guarantee).
std::vector<double> averaged_iterate(const std::vector<std::vector<double>>& phase_iterates,
                                     std::size_t phases);

}  // namespace coxsvrg
