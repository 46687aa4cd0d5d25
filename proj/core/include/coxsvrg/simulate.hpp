#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "coxsvrg/dataset.hpp"
#include "coxsvrg/rng.hpp"

namespace coxsvrg {

// Synthetic survival data: AR(1) Gaussian features (Toeplitz correlation
// rho^|i-j|), Weibull failure times from a proportional hazards model with
// baseline hazard nu * t^(nu-1), and exponential censoring whose intensity is
// calibrated so the realized censoring fraction lands near the target.
struct SimulationConfig {
  std::uint64_t n_obs = 100;
  std::uint64_t dims = 5;
  double toeplitz_rho = 0.5;       // in [0, 1)
  double weibull_shape = 1.0;      // nu > 0
  std::vector<double> true_theta;  // empty: default_true_theta(dims)
  double target_censoring = 0.3;   // in (0, 1), degenerate targets rejected
  std::uint64_t seed = 0;

  // Throws std::invalid_argument on any out-of-range field.
  void validate() const;
};

// ceil(dims/10) leading coordinates alternating +1, -1, ...; the rest zero.
std::vector<double> default_true_theta(std::size_t dims);

// Row-major n_obs x dims matrix; each row is a stationary AR(1) path:
// z_1 = e_1, z_j = rho z_{j-1} + sqrt(1 - rho^2) e_j with e_j iid N(0,1).
std::vector<double> gen_features(std::size_t n_obs, std::size_t dims, double rho,
                                 Rng& rng);

// T_i = (E_i / exp(x_i . theta))^(1/nu) with E_i iid Exp(1); the cumulative
// hazard at T_i is then exactly E_i. Times are clamped to keep them strictly
// positive and finite.
std::vector<double> gen_failure_times(std::span<const double> features,
                                      std::size_t n_obs, std::size_t dims,
                                      std::span<const double> theta, double shape,
                                      Rng& rng);

struct CensoringResult {
  std::vector<double> times;          // y_i = min(T_i, C_i)
  std::vector<std::uint8_t> events;   // 1 when T_i <= C_i
  double intensity = 0.0;             // calibrated exponential rate
  double realized_fraction = 0.0;
};

// C_i = F_i / intensity with F_i iid Exp(1), one draw per observation.
CensoringResult censor_with_intensity(std::span<const double> failure_times,
                                      double intensity, Rng& rng);

// Calibrates the intensity by bisection on the realized fraction (monotone in
// the intensity, reusing one fixed set of Exp(1) draws), then applies it.
CensoringResult apply_censoring(std::span<const double> failure_times, double target,
                                Rng& rng);

// Full pipeline; one Rng seeded from cfg.seed drives features, failure times,
// and censoring in that order, so identical configs give identical datasets.
SurvivalDataset simulate_dataset(const SimulationConfig& cfg);

// JSON sidecar describing how a written dataset was produced.
void write_simulation_metadata(const SimulationConfig& cfg, double realized_censoring,
                               std::size_t n_events,
                               const std::filesystem::path& path);

}  // namespace coxsvrg
