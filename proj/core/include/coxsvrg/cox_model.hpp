#pragma once

#include <span>
#include <vector>

#include "coxsvrg/dataset.hpp"
#include "coxsvrg/risk_set.hpp"
#include "coxsvrg/rng.hpp"

namespace coxsvrg {

// x_patient . v, charged to the ledger. The single place dot products happen.
double feature_product(const SurvivalDataset& data, std::size_t patient,
                       std::span<const double> v, InnerProductLedger& ledger);

// Softmax over failure f's risk set at theta, indexed by position in `order`
// (entries 0..risk_size(f)-1). Overflow-safe via max subtraction; the result
// sums to 1. Charges risk_size(f) inner products.
std::vector<double> softmax_weights(const SurvivalDataset& data, const RiskSetIndex& idx,
                                    std::size_t f, std::span<const double> theta,
                                    InnerProductLedger& ledger);

// Same, from caller-supplied products x_{order[p]} . theta for positions
// 0..risk_size(f)-1 at least. Charges nothing.
std::vector<double> softmax_weights_from_products(const RiskSetIndex& idx, std::size_t f,
                                                  std::span<const double> products);

// Gradient of f's contribution: -x_f + sum_j softmax_j x_j over the risk set.
// Charges risk_size(f).
std::vector<double> subfunction_gradient(const SurvivalDataset& data,
                                         const RiskSetIndex& idx, std::size_t f,
                                         std::span<const double> theta,
                                         InnerProductLedger& ledger);

// Averaged negative partial log-likelihood over failures. Charges n_active().
double neg_partial_loglik(const SurvivalDataset& data, const RiskSetIndex& idx,
                          std::span<const double> theta, InnerProductLedger& ledger);

// Mean of all subfunction gradients from one sweep. Charges n_active().
std::vector<double> full_gradient(const SurvivalDataset& data, const RiskSetIndex& idx,
                                  std::span<const double> theta,
                                  InnerProductLedger& ledger);

// Value and gradient from a single shared sweep; grad is resized. Charges
// n_active() once, not twice.
double loglik_and_gradient(const SurvivalDataset& data, const RiskSetIndex& idx,
                           std::span<const double> theta, std::vector<double>& grad,
                           InnerProductLedger& ledger);

// Mean subfunction gradient over a batch of failure ordinals; one sweep
// truncated at the largest risk set in the batch, so the charge is exactly
// max_{f in batch} risk_size(f). The batch must be nonempty.
std::vector<double> minibatch_gradient(const SurvivalDataset& data,
                                       const RiskSetIndex& idx,
                                       std::span<const std::size_t> batch,
                                       std::span<const double> theta,
                                       InnerProductLedger& ledger);

// Everything the variance-reduced solvers need at a phase anchor, built from
// one sweep (charges n_active() total, shared with the full-gradient pass):
// anchor products by position, softmax weights under one global shift with
// their prefix sums (for O(log) sampling), each failure's gradient, their
// mean, and the anchor objective value.
class PhaseCache {
 public:
  PhaseCache(const SurvivalDataset& data, const RiskSetIndex& idx,
             std::vector<double> anchor, InnerProductLedger& ledger);

  const std::vector<double>& anchor() const { return anchor_; }
  double anchor_product(std::size_t position) const { return products_[position]; }
  std::span<const double> anchor_products() const { return products_; }
  double anchor_weight(std::size_t position) const { return weights_[position]; }
  double prefix_weight_sum(std::size_t position) const { return prefix_sums_[position]; }

  std::span<const double> anchor_subgradient(std::size_t f) const {
    return {subgradients_.data() + f * dim_, dim_};
  }
  const std::vector<double>& anchor_full_gradient() const { return full_gradient_; }
  double anchor_loglik() const { return loglik_; }

  // One draw from the anchor softmax on failure f's risk set; returns a
  // position in [0, failure_prefix_end(f)]. Costs no inner products.
  std::size_t sample_anchor_softmax(std::size_t f, Rng& rng) const;

 private:
  const RiskSetIndex* idx_;
  std::size_t dim_;
  std::vector<double> anchor_;
  std::vector<double> products_;
  std::vector<double> weights_;
  std::vector<double> prefix_sums_;
  std::vector<double> subgradients_;
  std::vector<double> full_gradient_;
  double loglik_ = 0.0;
};

inline PhaseCache cache_phase_state(const SurvivalDataset& data, const RiskSetIndex& idx,
                                    std::span<const double> theta_tilde,
                                    InnerProductLedger& ledger) {
  return PhaseCache(data, idx, std::vector<double>(theta_tilde.begin(), theta_tilde.end()),
                    ledger);
}

}  // namespace coxsvrg
