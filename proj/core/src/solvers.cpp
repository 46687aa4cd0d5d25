#include "coxsvrg/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace coxsvrg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

class TraceRecorder {
 public:
  void record(std::uint64_t products, double objective, std::uint64_t phase) {
    const double secs = seconds_since(start_);
    auto& cps = trace_.checkpoints;
    if (!cps.empty() && cps.back().inner_products == products) {
      cps.back() = TraceCheckpoint{products, objective, secs, phase};
      return;
    }
    cps.push_back(TraceCheckpoint{products, objective, secs, phase});
  }
  ConvergenceTrace take() { return std::move(trace_); }

 private:
  ConvergenceTrace trace_;
  Clock::time_point start_ = Clock::now();
};

void check_start(const SurvivalDataset& data, std::span<const double> theta0) {
  if (theta0.size() != data.n_features())
    throw std::invalid_argument("solver: theta0 length does not match feature count");
  for (double v : theta0)
    if (!std::isfinite(v)) throw std::invalid_argument("solver: theta0 must be finite");
}

void check_config(const SolverConfig& cfg, const RiskSetIndex& idx) {
  if (cfg.phases == 0) throw std::invalid_argument("solver: phases must be >= 1");
  if (cfg.phase_length == 0)
    throw std::invalid_argument("solver: phase_length must be >= 1");
  if (!(cfg.step_size > 0.0) || !std::isfinite(cfg.step_size))
    throw std::invalid_argument("solver: step_size must be finite and > 0");
  if (cfg.switch_phase > cfg.phases)
    throw std::invalid_argument("solver: switch_phase must not exceed phases");
  if (cfg.switch_phase < cfg.phases) {
    if (cfg.minibatch_size == 0 || cfg.minibatch_size > idx.n_failures())
      throw std::invalid_argument(
          "solver: minibatch_size must lie in [1, number of failures]");
  }
}

// Partial Fisher-Yates over a persistent pool: each call draws `size`
// distinct failures, uniformly, independent across calls.
class BatchSampler {
 public:
  BatchSampler(std::size_t n, std::size_t size) : pool_(n), size_(size) {
    std::iota(pool_.begin(), pool_.end(), std::size_t{0});
  }
  std::span<const std::size_t> draw(Rng& rng) {
    for (std::size_t t = 0; t < size_; ++t) {
      const std::size_t j = t + rng.uniform_below(pool_.size() - t);
      std::swap(pool_[t], pool_[j]);
    }
    return {pool_.data(), size_};
  }

 private:
  std::vector<std::size_t> pool_;
  std::size_t size_;
};

SolveResult run_hybrid(const SurvivalDataset& data, const RiskSetIndex& idx,
                       const ElasticNetPenalty& pen, const SolverConfig& cfg,
                       std::span<const double> theta0, InnerProductLedger& ledger,
                       std::uint64_t budget, const InnerEstimator* override_est) {
  check_start(data, theta0);
  check_config(cfg, idx);

  const std::size_t d = data.n_features();
  const std::size_t n = idx.n_failures();
  const double gamma = cfg.step_size;

  InnerProductLedger side;
  TraceRecorder rec;
  Rng rng(cfg.seed);

  SolveResult result;
  std::vector<double> theta_tilde(theta0.begin(), theta0.end());
  std::vector<double> theta = theta_tilde;
  rec.record(ledger.count(), objective(data, idx, pen, theta_tilde, side), 0);

  const PhaseCache* cache_ptr = nullptr;
  const auto estimate = [&](std::size_t f, std::uint64_t n_iter) {
    if (override_est)
      return (*override_est)(f, theta, n_iter, *cache_ptr, rng, ledger);
    if (idx.risk_size(f) <= n_iter)  // exact sum is at least as cheap
      return subfunction_gradient(data, idx, f, theta, ledger);
    const EstimatorConfig ec(cfg.estimator, n_iter);
    return mcmc_estimate(data, idx, *cache_ptr, f, theta, ec, rng, ledger);
  };

  std::vector<double> phase_sum(d);
  std::vector<double> direction(d);
  std::vector<double> anchor_batch(d);
  BatchSampler batches(n, std::min<std::size_t>(cfg.minibatch_size, n));
  std::uint64_t total_steps = 0;
  bool out_of_budget = false;

  for (std::uint64_t k = 1; k <= cfg.phases; ++k) {
    if (ledger.count() >= budget) {
      out_of_budget = true;
      break;
    }
    const PhaseCache cache = cache_phase_state(data, idx, theta_tilde, ledger);
    cache_ptr = &cache;

    const bool mcmc = k <= cfg.switch_phase;
    const std::uint64_t n_inner =
        mcmc ? cfg.phase_length
             : std::max<std::uint64_t>(1, (cfg.phase_length - 1) / cfg.minibatch_size);
    const std::uint64_t n_iter =
        mcmc ? schedule_iterations(cfg.schedule, k, n, cfg.switch_phase) : 0;
    const std::vector<double>& g_full = cache.anchor_full_gradient();

    std::fill(phase_sum.begin(), phase_sum.end(), 0.0);
    std::uint64_t steps_done = 0;
    for (std::uint64_t t = 0; t < n_inner; ++t) {
      if (ledger.count() >= budget) {
        out_of_budget = true;
        break;
      }
      if (mcmc) {
        const std::size_t i = rng.uniform_below(n);
        const std::vector<double> ghat = estimate(i, n_iter);
        const std::span<const double> g_anchor = cache.anchor_subgradient(i);
        for (std::size_t j = 0; j < d; ++j)
          direction[j] = ghat[j] - g_anchor[j] + g_full[j];
      } else {
        const std::span<const std::size_t> batch = batches.draw(rng);
        const std::vector<double> g_batch =
            minibatch_gradient(data, idx, batch, theta, ledger);
        std::fill(anchor_batch.begin(), anchor_batch.end(), 0.0);
        for (std::size_t f : batch) {
          const std::span<const double> g = cache.anchor_subgradient(f);
          for (std::size_t j = 0; j < d; ++j) anchor_batch[j] += g[j];
        }
        const double b = static_cast<double>(batch.size());
        for (std::size_t j = 0; j < d; ++j)
          direction[j] = g_batch[j] - anchor_batch[j] / b + g_full[j];
      }
      for (std::size_t j = 0; j < d; ++j) theta[j] -= gamma * direction[j];
      pen.prox_inplace(theta, gamma);
      for (std::size_t j = 0; j < d; ++j) phase_sum[j] += theta[j];
      ++steps_done;
      ++total_steps;
      if (cfg.checkpoint_every != 0 && total_steps % cfg.checkpoint_every == 0)
        rec.record(ledger.count(), objective(data, idx, pen, theta, side), k);
    }
    if (out_of_budget) break;

    const double inv = 1.0 / static_cast<double>(steps_done);
    for (std::size_t j = 0; j < d; ++j) theta_tilde[j] = phase_sum[j] * inv;
    theta = theta_tilde;
    result.phase_iterates.push_back(theta_tilde);
    rec.record(ledger.count(), objective(data, idx, pen, theta_tilde, side), k);
  }

  result.theta = out_of_budget ? theta : theta_tilde;
  result.status = out_of_budget ? SolveStatus::BudgetExhausted : SolveStatus::Completed;
  rec.record(ledger.count(),
             objective(data, idx, pen, result.theta, side),
             result.phase_iterates.size());
  result.trace = rec.take();
  return result;
}

}  // namespace

SolveResult fista(const SurvivalDataset& data, const RiskSetIndex& idx,
                  const ElasticNetPenalty& pen, std::span<const double> theta0,
                  double tol, std::uint64_t max_inner_products,
                  InnerProductLedger& ledger) {
  check_start(data, theta0);
  if (!(tol > 0.0)) throw std::invalid_argument("fista: tol must be > 0");

  const std::size_t d = data.n_features();
  InnerProductLedger side;
  TraceRecorder rec;

  std::vector<double> x(theta0.begin(), theta0.end());
  std::vector<double> y = x;
  std::vector<double> x_prev(d);
  std::vector<double> grad(d);
  std::vector<double> cand(d);
  double t_momentum = 1.0;
  double gamma = 1.0;
  double f_cand = 0.0;
  std::uint64_t last_iter = 0;

  SolveResult result;
  result.status = SolveStatus::BudgetExhausted;
  rec.record(ledger.count(), objective(data, idx, pen, x, side), 0);

  for (std::uint64_t iter = 1;; ++iter) {
    last_iter = iter;
    if (ledger.count() >= max_inner_products) break;
    const double f_y = loglik_and_gradient(data, idx, y, grad, ledger);

    // Halve gamma until the prox step satisfies the quadratic upper bound
    // f(cand) <= f(y) + <grad, cand - y> + |cand - y|^2 / (2 gamma).
    bool budget_hit = false;
    while (true) {
      cand = y;
      for (std::size_t j = 0; j < d; ++j) cand[j] -= gamma * grad[j];
      pen.prox_inplace(cand, gamma);
      if (ledger.count() >= max_inner_products) {
        budget_hit = true;
        break;
      }
      f_cand = neg_partial_loglik(data, idx, cand, ledger);
      double linear = 0.0;
      double sq = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double step = cand[j] - y[j];
        linear += grad[j] * step;
        sq += step * step;
      }
      const double bound = f_y + linear + 0.5 * sq / gamma;
      if (f_cand <= bound + 1e-12 * std::max(1.0, std::abs(bound))) break;
      gamma *= 0.5;
      if (gamma < 1e-18)
        throw std::runtime_error("fista: backtracking collapsed; data may be degenerate");
    }
    if (budget_hit) break;

    double move_sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double step = cand[j] - y[j];
      move_sq += step * step;
    }

    x_prev = x;
    x = cand;
    rec.record(ledger.count(), f_cand + pen.value(x), iter);

    // Cheap trigger, then a confirmed gradient-mapping check at x itself.
    if (std::sqrt(move_sq) / gamma <= tol) {
      if (ledger.count() >= max_inner_products) break;
      loglik_and_gradient(data, idx, x, grad, ledger);
      cand = x;
      for (std::size_t j = 0; j < d; ++j) cand[j] -= gamma * grad[j];
      pen.prox_inplace(cand, gamma);
      double res_sq = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double r = x[j] - cand[j];
        res_sq += r * r;
      }
      const double residual = std::sqrt(res_sq);
      if (residual / gamma <= tol) {
        result.status = SolveStatus::Converged;
        result.residual = residual;
        rec.record(ledger.count(), objective(data, idx, pen, x, side), iter);
        break;
      }
    }

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
    const double beta = (t_momentum - 1.0) / t_next;
    for (std::size_t j = 0; j < d; ++j) y[j] = x[j] + beta * (x[j] - x_prev[j]);
    t_momentum = t_next;
  }

  result.theta = std::move(x);
  rec.record(ledger.count(), objective(data, idx, pen, result.theta, side), last_iter);
  result.trace = rec.take();
  return result;
}

SolveResult hsvrg(const SurvivalDataset& data, const RiskSetIndex& idx,
                  const ElasticNetPenalty& pen, const SolverConfig& cfg,
                  std::span<const double> theta0, InnerProductLedger& ledger,
                  std::uint64_t budget) {
  return run_hybrid(data, idx, pen, cfg, theta0, ledger, budget, nullptr);
}

SolveResult hsvrg(const SurvivalDataset& data, const RiskSetIndex& idx,
                  const ElasticNetPenalty& pen, const SolverConfig& cfg,
                  std::span<const double> theta0, InnerProductLedger& ledger,
                  std::uint64_t budget, const InnerEstimator& estimator) {
  return run_hybrid(data, idx, pen, cfg, theta0, ledger, budget, &estimator);
}

SolveResult two_svrg(const SurvivalDataset& data, const RiskSetIndex& idx,
                     const ElasticNetPenalty& pen, const SolverConfig& cfg,
                     std::span<const double> theta0, InnerProductLedger& ledger,
                     std::uint64_t budget) {
  SolverConfig all_mcmc = cfg;
  all_mcmc.switch_phase = cfg.phases;
  return run_hybrid(data, idx, pen, all_mcmc, theta0, ledger, budget, nullptr);
}

SolveResult two_svrg(const SurvivalDataset& data, const RiskSetIndex& idx,
                     const ElasticNetPenalty& pen, const SolverConfig& cfg,
                     std::span<const double> theta0, InnerProductLedger& ledger,
                     std::uint64_t budget, const InnerEstimator& estimator) {
  SolverConfig all_mcmc = cfg;
  all_mcmc.switch_phase = cfg.phases;
  return run_hybrid(data, idx, pen, all_mcmc, theta0, ledger, budget, &estimator);
}

SolveResult prox_svrg_minibatch(const SurvivalDataset& data, const RiskSetIndex& idx,
                                const ElasticNetPenalty& pen, const SolverConfig& cfg,
                                std::span<const double> theta0,
                                InnerProductLedger& ledger, std::uint64_t budget) {
  SolverConfig all_mb = cfg;
  all_mb.switch_phase = 0;
  return run_hybrid(data, idx, pen, all_mb, theta0, ledger, budget, nullptr);
}

std::vector<double> averaged_iterate(const std::vector<std::vector<double>>& phase_iterates,
                                     std::size_t phases) {
  if (phases == 0 || phases > phase_iterates.size())
    throw std::invalid_argument("averaged_iterate: phases out of range");
  const std::size_t d = phase_iterates[0].size();
  std::vector<double> mean(d, 0.0);
  for (std::size_t k = 0; k < phases; ++k)
    for (std::size_t j = 0; j < d; ++j) mean[j] += phase_iterates[k][j];
  for (std::size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(phases);
  return mean;
}

}  // namespace coxsvrg
