#include "coxsvrg/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace coxsvrg {

void SimulationConfig::validate() const {
  if (n_obs == 0) throw std::invalid_argument("simulate: n_obs must be >= 1");
  if (dims == 0) throw std::invalid_argument("simulate: dims must be >= 1");
  if (!(toeplitz_rho >= 0.0 && toeplitz_rho < 1.0))
    throw std::invalid_argument("simulate: toeplitz_rho must lie in [0, 1)");
  if (!(weibull_shape > 0.0) || !std::isfinite(weibull_shape))
    throw std::invalid_argument("simulate: weibull_shape must be finite and > 0");
  if (!(target_censoring > 0.0 && target_censoring < 1.0))
    throw std::invalid_argument("simulate: target_censoring must lie strictly in (0, 1)");
  if (!true_theta.empty() && true_theta.size() != dims)
    throw std::invalid_argument("simulate: true_theta length must equal dims");
  for (double v : true_theta)
    if (!std::isfinite(v)) throw std::invalid_argument("simulate: true_theta must be finite");
}

std::vector<double> default_true_theta(std::size_t dims) {
  std::vector<double> theta(dims, 0.0);
  const std::size_t active = (dims + 9) / 10;
  for (std::size_t j = 0; j < active; ++j) theta[j] = (j % 2 == 0) ? 1.0 : -1.0;
  return theta;
}

std::vector<double> gen_features(std::size_t n_obs, std::size_t dims, double rho,
                                 Rng& rng) {
  std::vector<double> features(n_obs * dims);
  const double innovation = std::sqrt(1.0 - rho * rho);
  for (std::size_t i = 0; i < n_obs; ++i) {
    double* row = features.data() + i * dims;
    row[0] = rng.normal();
    for (std::size_t j = 1; j < dims; ++j)
      row[j] = rho * row[j - 1] + innovation * rng.normal();
  }
  return features;
}

std::vector<double> gen_failure_times(std::span<const double> features,
                                      std::size_t n_obs, std::size_t dims,
                                      std::span<const double> theta, double shape,
                                      Rng& rng) {
  if (theta.size() != dims)
    throw std::invalid_argument("gen_failure_times: theta length must equal dims");
  std::vector<double> times(n_obs);
  for (std::size_t i = 0; i < n_obs; ++i) {
    const double* row = features.data() + i * dims;
    double z = 0.0;
    for (std::size_t j = 0; j < dims; ++j) z += row[j] * theta[j];
    const double e = rng.exponential();
    double t = std::pow(e / std::exp(z), 1.0 / shape);
    t = std::clamp(t, 1e-300, 1e300);
    times[i] = t;
  }
  return times;
}

CensoringResult censor_with_intensity(std::span<const double> failure_times,
                                      double intensity, Rng& rng) {
  if (!(intensity > 0.0))
    throw std::invalid_argument("censoring: intensity must be > 0");
  const std::size_t n = failure_times.size();
  CensoringResult out;
  out.intensity = intensity;
  out.times.resize(n);
  out.events.resize(n);
  std::size_t censored = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = rng.exponential() / intensity;
    if (failure_times[i] <= c) {
      out.times[i] = failure_times[i];
      out.events[i] = 1;
    } else {
      out.times[i] = c;
      out.events[i] = 0;
      ++censored;
    }
  }
  out.realized_fraction = static_cast<double>(censored) / static_cast<double>(n);
  return out;
}

CensoringResult apply_censoring(std::span<const double> failure_times, double target,
                                Rng& rng) {
  if (!(target > 0.0 && target < 1.0))
    throw std::invalid_argument("censoring: target fraction must lie strictly in (0, 1)");
  const std::size_t n = failure_times.size();
  if (n == 0) throw std::invalid_argument("censoring: no observations");

  // One Exp(1) draw per observation; patient i is censored iff
  // F_i < intensity * T_i, so the realized fraction is monotone in the
  // intensity and bisection on the same draws converges.
  std::vector<double> exp_draws(n);
  for (double& f : exp_draws) f = rng.exponential();

  const auto censored_fraction = [&](double intensity) {
    std::size_t censored = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (exp_draws[i] < intensity * failure_times[i]) ++censored;
    return static_cast<double>(censored) / static_cast<double>(n);
  };

  double lo = 0.0;
  double hi = 1.0;
  for (int grow = 0; grow < 200 && censored_fraction(hi) < target; ++grow) hi *= 2.0;
  for (int step = 0; step < 200; ++step) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (censored_fraction(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  const double intensity =
      std::abs(censored_fraction(lo) - target) < std::abs(censored_fraction(hi) - target)
          ? (lo > 0.0 ? lo : hi)
          : hi;

  CensoringResult out;
  out.intensity = intensity;
  out.times.resize(n);
  out.events.resize(n);
  std::size_t censored = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = exp_draws[i] / intensity;
    if (failure_times[i] <= c) {
      out.times[i] = failure_times[i];
      out.events[i] = 1;
    } else {
      out.times[i] = c;
      out.events[i] = 0;
      ++censored;
    }
  }
  out.realized_fraction = static_cast<double>(censored) / static_cast<double>(n);
  return out;
}

SurvivalDataset simulate_dataset(const SimulationConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const std::size_t n = cfg.n_obs;
  const std::size_t d = cfg.dims;
  std::vector<double> features = gen_features(n, d, cfg.toeplitz_rho, rng);
  const std::vector<double> theta =
      cfg.true_theta.empty() ? default_true_theta(d) : cfg.true_theta;
  const std::vector<double> failure_times =
      gen_failure_times(features, n, d, theta, cfg.weibull_shape, rng);
  CensoringResult censored = apply_censoring(failure_times, cfg.target_censoring, rng);
  return SurvivalDataset(std::move(features), d, std::move(censored.times),
                         std::move(censored.events));
}

void write_simulation_metadata(const SimulationConfig& cfg, double realized_censoring,
                               std::size_t n_events,
                               const std::filesystem::path& path) {
  nlohmann::json meta;
  meta["n_obs"] = cfg.n_obs;
  meta["dims"] = cfg.dims;
  meta["toeplitz_rho"] = cfg.toeplitz_rho;
  meta["weibull_shape"] = cfg.weibull_shape;
  meta["true_theta"] = cfg.true_theta.empty() ? default_true_theta(cfg.dims) : cfg.true_theta;
  meta["target_censoring"] = cfg.target_censoring;
  meta["seed"] = cfg.seed;
  meta["realized_censoring"] = realized_censoring;
  meta["n_events"] = n_events;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write metadata: " + path.string());
  out << meta.dump(2) << '\n';
}

}  // namespace coxsvrg
