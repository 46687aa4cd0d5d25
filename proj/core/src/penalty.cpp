#include "coxsvrg/penalty.hpp"

#include <cmath>
#include <stdexcept>

namespace coxsvrg {

ElasticNetPenalty::ElasticNetPenalty(double lambda_in, double alpha_in)
    : lambda(lambda_in), alpha(alpha_in) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("penalty: lambda must be finite and >= 0");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("penalty: alpha must lie in [0, 1]");
}

double ElasticNetPenalty::value(std::span<const double> theta) const {
  double l1 = 0.0;
  double sq = 0.0;
  for (double v : theta) {
    l1 += std::abs(v);
    sq += v * v;
  }
  return lambda * (alpha * l1 + 0.5 * (1.0 - alpha) * sq);
}

void ElasticNetPenalty::prox_inplace(std::vector<double>& v, double gamma) const {
  if (!(gamma > 0.0)) throw std::invalid_argument("prox: gamma must be > 0");
  const double threshold = gamma * lambda * alpha;
  const double shrink = 1.0 / (1.0 + gamma * lambda * (1.0 - alpha));
  for (double& u : v) {
    const double mag = std::abs(u) - threshold;
    u = mag > 0.0 ? std::copysign(mag, u) * shrink : 0.0;
  }
}

std::vector<double> ElasticNetPenalty::prox(std::span<const double> v, double gamma) const {
  std::vector<double> out(v.begin(), v.end());
  prox_inplace(out, gamma);
  return out;
}

double objective(const SurvivalDataset& data, const RiskSetIndex& idx,
                 const ElasticNetPenalty& pen, std::span<const double> theta,
                 InnerProductLedger& ledger) {
  return neg_partial_loglik(data, idx, theta, ledger) + pen.value(theta);
}

}  // namespace coxsvrg
