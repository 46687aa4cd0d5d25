#pragma once

#include <span>
#include <vector>

#include "coxsvrg/cox_model.hpp"

namespace coxsvrg {

// Elastic net h(theta) = lambda * (alpha * |theta|_1 + (1-alpha)/2 * |theta|_2^2).
// The ridge part is what makes the composite objective strongly convex; it is
// kept inside the penalty, never folded into the likelihood.
struct ElasticNetPenalty {
  double lambda = 0.0;
  double alpha = 0.0;

  // Throws std::invalid_argument unless lambda >= 0 and alpha in [0, 1].
  ElasticNetPenalty(double lambda, double alpha);

  double value(std::span<const double> theta) const;

  // Coordinatewise closed form: soft-threshold by gamma*lambda*alpha, then
  // shrink by 1/(1 + gamma*lambda*(1-alpha)). gamma > 0.
  std::vector<double> prox(std::span<const double> v, double gamma) const;
  void prox_inplace(std::vector<double>& v, double gamma) const;

  double strong_convexity() const { return lambda * (1.0 - alpha); }
};

// Penalized objective F = neg_partial_loglik + penalty. Charges n_active().
double objective(const SurvivalDataset& data, const RiskSetIndex& idx,
                 const ElasticNetPenalty& pen, std::span<const double> theta,
                 InnerProductLedger& ledger);

}  // namespace coxsvrg
