#include "coxsvrg/estimators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace coxsvrg {

EstimatorConfig::EstimatorConfig(EstimatorKind k, std::uint64_t n)
    : kind(k), iterations(n) {
  if (iterations == 0)
    throw std::invalid_argument("estimator: iterations must be >= 1");
}

namespace {

void check_failure(const RiskSetIndex& idx, std::size_t f) {
  if (f >= idx.n_failures())
    throw std::invalid_argument("estimator: failure ordinal out of range");
}

}  // namespace

std::vector<double> imh_estimate(const SurvivalDataset& data, const RiskSetIndex& idx,
                                 const PhaseCache& cache, std::size_t f,
                                 std::span<const double> theta, const EstimatorConfig& cfg,
                                 Rng& rng, InnerProductLedger& ledger) {
  check_failure(idx, f);
  const bool adaptive = cfg.kind == EstimatorKind::ImhAdaptive;
  if (!adaptive && cfg.kind != EstimatorKind::ImhUniform)
    throw std::invalid_argument("imh_estimate: config is not an IMH kind");
  const std::size_t p_end = idx.failure_prefix_end(f);
  const std::size_t d = data.n_features();

  const auto propose = [&]() -> std::size_t {
    return adaptive ? cache.sample_anchor_softmax(f, rng)
                    : rng.uniform_below(p_end + 1);
  };
  // Log target-to-proposal score of a state. For the uniform proposal the MH
  // ratio is exp(z' - z); for the anchor proposal the anchor part of the
  // softmax cancels, leaving exp((z' - z~') - (z - z~)). Either way one fresh
  // product per proposal.
  const auto score = [&](std::size_t pos, double z) {
    return adaptive ? z - cache.anchor_product(pos) : z;
  };

  std::size_t cur = propose();
  double z_cur = feature_product(data, idx.patient_at(cur), theta, ledger);
  double score_cur = score(cur, z_cur);

  std::vector<double> sum(d, 0.0);
  for (std::uint64_t l = 0; l < cfg.iterations; ++l) {
    const std::size_t prop = propose();
    const double z_prop = feature_product(data, idx.patient_at(prop), theta, ledger);
    const double score_prop = score(prop, z_prop);
    const double log_ratio = score_prop - score_cur;
    if (log_ratio >= 0.0 || rng.uniform01() < std::exp(log_ratio)) {
      cur = prop;
      z_cur = z_prop;
      score_cur = score_prop;
    }
    const std::span<const double> x = data.row(idx.patient_at(cur));
    for (std::size_t k = 0; k < d; ++k) sum[k] += x[k];
  }

  const std::span<const double> xi = data.row(idx.failure_patient(f));
  const double n = static_cast<double>(cfg.iterations);
  std::vector<double> est(d);
  for (std::size_t k = 0; k < d; ++k) est[k] = -xi[k] + sum[k] / n;
  return est;
}

std::vector<double> nis_estimate(const SurvivalDataset& data, const RiskSetIndex& idx,
                                 const PhaseCache& cache, std::size_t f,
                                 std::span<const double> theta, const EstimatorConfig& cfg,
                                 Rng& rng, InnerProductLedger& ledger) {
  check_failure(idx, f);
  if (cfg.kind != EstimatorKind::Nis)
    throw std::invalid_argument("nis_estimate: config is not the NIS kind");
  const std::size_t d = data.n_features();

  std::vector<double> v(d, 0.0);
  double s = 0.0;
  double shift = -std::numeric_limits<double>::infinity();
  for (std::uint64_t l = 0; l < cfg.iterations; ++l) {
    const std::size_t pos = cache.sample_anchor_softmax(f, rng);
    const std::size_t patient = idx.patient_at(pos);
    const double z = feature_product(data, patient, theta, ledger);
    const double e = z - cache.anchor_product(pos);
    if (e > shift) {
      if (s > 0.0) {
        const double rescale = std::exp(shift - e);
        s *= rescale;
        for (std::size_t k = 0; k < d; ++k) v[k] *= rescale;
      }
      shift = e;
    }
    const double w = std::exp(e - shift);
    const std::span<const double> x = data.row(patient);
    s += w;
    for (std::size_t k = 0; k < d; ++k) v[k] += w * x[k];
  }

  const std::span<const double> xi = data.row(idx.failure_patient(f));
  std::vector<double> est(d);
  for (std::size_t k = 0; k < d; ++k) est[k] = -xi[k] + v[k] / s;
  return est;
}

std::vector<double> mcmc_estimate(const SurvivalDataset& data, const RiskSetIndex& idx,
                                  const PhaseCache& cache, std::size_t f,
                                  std::span<const double> theta, const EstimatorConfig& cfg,
                                  Rng& rng, InnerProductLedger& ledger) {
  if (cfg.kind == EstimatorKind::Nis)
    return nis_estimate(data, idx, cache, f, theta, cfg, rng, ledger);
  return imh_estimate(data, idx, cache, f, theta, cfg, rng, ledger);
}

BiasVarianceReport assess_estimator(const SurvivalDataset& data, const RiskSetIndex& idx,
                                    const PhaseCache& cache, std::size_t f,
                                    std::span<const double> theta,
                                    const EstimatorConfig& cfg, std::uint64_t replicates,
                                    Rng& rng) {
  if (replicates == 0)
    throw std::invalid_argument("assess_estimator: replicates must be >= 1");
  InnerProductLedger scratch;
  const std::vector<double> exact = subfunction_gradient(data, idx, f, theta, scratch);
  const std::size_t d = data.n_features();

  std::vector<double> bias(d, 0.0);
  double mse = 0.0;
  for (std::uint64_t r = 0; r < replicates; ++r) {
    const std::vector<double> est =
        mcmc_estimate(data, idx, cache, f, theta, cfg, rng, scratch);
    double sq = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double err = est[k] - exact[k];
      bias[k] += err;
      sq += err * err;
    }
    mse += sq;
  }
  const double r = static_cast<double>(replicates);
  double bias_sq = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    bias[k] /= r;
    bias_sq += bias[k] * bias[k];
  }
  return BiasVarianceReport{std::sqrt(bias_sq), mse / r, replicates, cfg.iterations};
}

}  // namespace coxsvrg
