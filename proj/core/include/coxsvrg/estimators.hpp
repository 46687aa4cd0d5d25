#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "coxsvrg/cox_model.hpp"

namespace coxsvrg {

enum class EstimatorKind { ImhUniform, ImhAdaptive, Nis };

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::Nis;
  std::uint64_t iterations = 1;  // chain steps or importance draws, >= 1

  EstimatorConfig(EstimatorKind k, std::uint64_t n);
};

// Independent Metropolis-Hastings estimate of failure f's gradient at theta.
// The proposal is uniform over the risk set (ImhUniform) or the cached anchor
// softmax (ImhAdaptive); in both cases the acceptance ratio collapses to a
// single exponential, so each proposal costs exactly one inner product. The
// chain starts from a proposal draw and averages the states after each of the
// `iterations` transitions. Charges iterations + 1 (the start state's product).
std::vector<double> imh_estimate(const SurvivalDataset& data, const RiskSetIndex& idx,
                                 const PhaseCache& cache, std::size_t f,
                                 std::span<const double> theta, const EstimatorConfig& cfg,
                                 Rng& rng, InnerProductLedger& ledger);

// Self-normalized importance sampling with the cached anchor softmax as the
// proposal: weights exp((theta - anchor) . x_j) accumulated under a running
// max shift. Charges exactly `iterations` inner products.
std::vector<double> nis_estimate(const SurvivalDataset& data, const RiskSetIndex& idx,
                                 const PhaseCache& cache, std::size_t f,
                                 std::span<const double> theta, const EstimatorConfig& cfg,
                                 Rng& rng, InnerProductLedger& ledger);

// Dispatch on cfg.kind.
std::vector<double> mcmc_estimate(const SurvivalDataset& data, const RiskSetIndex& idx,
                                  const PhaseCache& cache, std::size_t f,
                                  std::span<const double> theta, const EstimatorConfig& cfg,
                                  Rng& rng, InnerProductLedger& ledger);

struct BiasVarianceReport {
  double mean_bias_norm = 0.0;     // |mean over replicates of (estimate - exact)|_2
  double mean_squared_error = 0.0; // mean over replicates of |estimate - exact|_2^2
  std::uint64_t replicates = 0;
  std::uint64_t iterations = 0;
};

// Replicated error study against the exact subfunction gradient. Diagnostic:
// runs on a scratch ledger, charging the caller nothing. replicates >= 1.
BiasVarianceReport assess_estimator(const SurvivalDataset& data, const RiskSetIndex& idx,
                                    const PhaseCache& cache, std::size_t f,
                                    std::span<const double> theta,
                                    const EstimatorConfig& cfg, std::uint64_t replicates,
                                    Rng& rng);

}  // namespace coxsvrg
