// End-to-end acceptance checks for the doubly stochastic Cox solver stack.
// Each criterion prints one PASS/FAIL line with its key numbers; run with no
// arguments for all ten or with --criterion N for one. Criterion 10 is a
// directional speed comparison whose failure flags tuning rather than a
// defect, so the all-criteria exit code gates on 1-9 only.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "coxsvrg/bench.hpp"
#include "coxsvrg/cox_model.hpp"
#include "coxsvrg/estimators.hpp"
#include "coxsvrg/penalty.hpp"
#include "coxsvrg/schedule.hpp"
#include "coxsvrg/simulate.hpp"
#include "coxsvrg/solvers.hpp"
#include "oracles.hpp"

using namespace coxsvrg;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return std::string(buf);
}

// All-event instance with distinct times, so failure f's risk set has exactly
// f + 1 patients and every patient is in some risk set.
oracle::Instance ladder_instance(Rng& rng, std::size_t n_pat, std::size_t d) {
  std::vector<double> X(n_pat * d);
  for (double& v : X) v = 0.5 * rng.normal();
  std::vector<double> times(n_pat);
  for (std::size_t i = 0; i < n_pat; ++i) times[i] = static_cast<double>(n_pat - i);
  std::vector<std::uint8_t> events(n_pat, 1);
  SurvivalDataset data(std::move(X), d, std::move(times), std::move(events));
  RiskSetIndex idx = build_risk_index(data);
  return {std::move(data), std::move(idx)};
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// One-sample Kolmogorov-Smirnov distance against Exp(1).
double ks_vs_exponential(std::vector<double> draws) {
  std::sort(draws.begin(), draws.end());
  const double n = static_cast<double>(draws.size());
  double d = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double cdf = 1.0 - std::exp(-draws[i]);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(std::abs(cdf - lo), std::abs(hi - cdf)));
  }
  return d;
}

// --- 1: the full gradient agrees with its two independent definitions. -----

Outcome gradient_oracle_equivalence() {
  Rng rng(101);
  double worst_rel = 0.0;
  double worst_fd = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n_pat = 5 + rng.uniform_below(46);
    const std::size_t d = 1 + rng.uniform_below(10);
    const auto inst = oracle::random_instance(rng, n_pat, d, 0.3, t % 3 == 0);
    std::vector<double> theta(d);
    for (double& v : theta) v = 0.4 * rng.normal();

    InnerProductLedger scratch;
    const auto g = full_gradient(inst.data, inst.idx, theta, scratch);

    // Mean of the per-failure gradients computed one at a time.
    const std::size_t n_fail = inst.idx.n_failures();
    std::vector<double> mean(d, 0.0);
    for (std::size_t f = 0; f < n_fail; ++f) {
      const auto gf = subfunction_gradient(inst.data, inst.idx, f, theta, scratch);
      for (std::size_t j = 0; j < d; ++j) mean[j] += gf[j];
    }
    for (double& v : mean) v /= static_cast<double>(n_fail);
    for (std::size_t j = 0; j < d; ++j)
      worst_rel = std::max(worst_rel,
                           std::abs(g[j] - mean[j]) / std::max(1.0, std::abs(g[j])));

    // Central differences of the likelihood itself.
    const double h = 1e-6;
    std::vector<double> probe = theta;
    for (std::size_t j = 0; j < d; ++j) {
      probe[j] = theta[j] + h;
      const double up = neg_partial_loglik(inst.data, inst.idx, probe, scratch);
      probe[j] = theta[j] - h;
      const double dn = neg_partial_loglik(inst.data, inst.idx, probe, scratch);
      probe[j] = theta[j];
      worst_fd = std::max(worst_fd, std::abs((up - dn) / (2.0 * h) - g[j]));
    }
  }
  return {worst_rel <= 1e-10 && worst_fd <= 1e-5,
          fmt("max rel err %.2e (<= 1e-10), max finite-diff err %.2e (<= 1e-5)",
              worst_rel, worst_fd)};
}

// --- 2: the closed-form prox is the actual minimizer. -----------------------

Outcome prox_correctness() {
  Rng rng(102);
  double worst_gap = 0.0;    // how far below the closed form any grid point gets
  double worst_fixed = 0.0;  // subgradient optimality residual
  for (int t = 0; t < 200; ++t) {
    const double v = -5.0 + 10.0 * rng.uniform01();
    const double lam = 2.0 * rng.uniform01();
    const double alpha = rng.uniform01();
    const double gamma = 0.05 + 3.0 * rng.uniform01();
    const ElasticNetPenalty pen(lam, alpha);

    std::vector<double> u{v};
    pen.prox_inplace(u, gamma);
    const auto prox_obj = [&](double x) {
      const double diff = x - v;
      return diff * diff / (2.0 * gamma) +
             lam * (alpha * std::abs(x) + 0.5 * (1.0 - alpha) * x * x);
    };
    const double at_u = prox_obj(u[0]);
    for (int i = 0; i <= 120000; ++i) {
      const double x = -6.0 + 1e-4 * static_cast<double>(i);
      worst_gap = std::max(worst_gap, at_u - prox_obj(x));
    }

    if (u[0] != 0.0) {
      const double resid = (u[0] - v) / gamma + lam * alpha * (u[0] > 0.0 ? 1.0 : -1.0) +
                           lam * (1.0 - alpha) * u[0];
      worst_fixed = std::max(worst_fixed, std::abs(resid));
    } else {
      worst_fixed = std::max(worst_fixed, std::max(0.0, std::abs(v) / gamma - lam * alpha));
    }
  }
  return {worst_gap <= 1e-12 && worst_fixed <= 1e-10,
          fmt("max grid improvement %.2e (<= 1e-12), fixed-point residual %.2e (<= 1e-10)",
              worst_gap, worst_fixed)};
}

// --- 3: chain error shrinks at the expected rate in the iteration count. ----

Outcome estimator_error_scaling() {
  Rng rng(103);
  const std::size_t d = 4;
  const auto inst = ladder_instance(rng, 20, d);  // last failure sees all 20
  const std::size_t f = inst.idx.n_failures() - 1;
  std::vector<double> theta(d);
  for (double& v : theta) v = 0.6 * rng.normal();

  InnerProductLedger ledger;
  const PhaseCache cache(inst.data, inst.idx, std::vector<double>(d, 0.0), ledger);
  const std::uint64_t reps = 100000;
  Rng r20(1003), r200(1004);
  const auto short_run = assess_estimator(inst.data, inst.idx, cache, f, theta,
                                          EstimatorConfig(EstimatorKind::ImhUniform, 20),
                                          reps, r20);
  const auto long_run = assess_estimator(inst.data, inst.idx, cache, f, theta,
                                         EstimatorConfig(EstimatorKind::ImhUniform, 200),
                                         reps, r200);
  const double ratio = short_run.mean_squared_error / long_run.mean_squared_error;
  const bool bias_ok = long_run.mean_bias_norm < short_run.mean_bias_norm;
  return {ratio >= 5.0 && ratio <= 20.0 && bias_ok,
          fmt("mse(N=20)/mse(N=200) = %.2f (in [5, 20]), bias %.2e -> %.2e (shrinks)",
              ratio, short_run.mean_bias_norm, long_run.mean_bias_norm)};
}

// --- 4: the chain's occupancy matches the softmax target. -------------------

Outcome chain_stationarity() {
  // Indicator features make state occupancy readable off the estimate.
  std::vector<double> X = {1.0, 0.0, 0.0, 1.0, 0.0, 0.0};
  std::vector<double> times = {3.0, 2.0, 1.0};
  std::vector<std::uint8_t> events = {1, 1, 1};
  const SurvivalDataset data(std::move(X), 2, std::move(times), std::move(events));
  const RiskSetIndex idx = build_risk_index(data);
  const std::size_t f = 2;  // all three patients at risk
  const std::vector<double> theta = {0.8, -0.4};

  // Softmax target over positions 0, 1, 2 (features e1, e2, 0).
  const double w0 = std::exp(0.8), w1 = std::exp(-0.4), w2 = 1.0;
  const double z = w0 + w1 + w2;
  const std::array<double, 3> pi = {w0 / z, w1 / z, w2 / z};

  InnerProductLedger ledger;
  const PhaseCache cache(data, idx, {0.2, 0.1}, ledger);  // anchor != theta
  double worst_tv = 0.0;
  for (const EstimatorKind kind : {EstimatorKind::ImhUniform, EstimatorKind::ImhAdaptive}) {
    Rng rng(104 + static_cast<std::uint64_t>(kind));
    const auto est = imh_estimate(data, idx, cache, f, theta,
                                  EstimatorConfig(kind, 1000000), rng, ledger);
    // est = -x_i + (occupancy of state 0, occupancy of state 1); x_i = 0.
    const std::array<double, 3> occ = {est[0], est[1], 1.0 - est[0] - est[1]};
    double tv = 0.0;
    for (std::size_t s = 0; s < 3; ++s) tv += std::abs(occ[s] - pi[s]);
    worst_tv = std::max(worst_tv, 0.5 * tv);
  }
  return {worst_tv <= 0.01,
          fmt("worst occupancy TV over both proposals %.4f (<= 0.01, 1e6 steps)", worst_tv)};
}

// --- 5: with exact inner gradients the engine is plain prox-SVRG. -----------

Outcome exact_estimator_reduction() {
  double worst = 0.0;
  std::uint64_t seed = 41;
  for (const std::size_t n_pat : {8, 12, 20}) {
    Rng rng(400 + seed);
    const auto inst = oracle::random_instance(rng, n_pat, 3, 0.3, n_pat == 12);
    const ElasticNetPenalty pen(0.1, 0.5);
    const std::vector<double> theta0(3, 0.0);
    const double gamma = 0.05;

    const auto ref = oracle::textbook_prox_svrg(inst.data, inst.idx, pen, theta0, 3, 8,
                                                gamma, seed);

    SolverConfig cfg;
    cfg.phases = 3;
    cfg.phase_length = 8;
    cfg.step_size = gamma;
    cfg.seed = seed;
    const InnerEstimator exact = [&inst](std::size_t f, std::span<const double> theta,
                                         std::uint64_t, const PhaseCache&, Rng&,
                                         InnerProductLedger& ledger) {
      return subfunction_gradient(inst.data, inst.idx, f, theta, ledger);
    };
    InnerProductLedger ledger;
    const auto run = two_svrg(inst.data, inst.idx, pen, cfg, theta0, ledger, kUnlimited,
                              exact);

    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t j = 0; j < 3; ++j)
        worst = std::max(worst,
                         std::abs(run.phase_iterates[k][j] - ref.phase_iterates[k][j]));
    for (std::size_t j = 0; j < 3; ++j)
      worst = std::max(worst, std::abs(run.theta[j] - ref.theta[j]));
    ++seed;
  }
  return {worst <= 1e-12, fmt("max per-iterate deviation %.2e (<= 1e-12)", worst)};
}

// --- 6: geometric decay on a strongly convex ridge problem. -----------------

Outcome geometric_phase_decay() {
  SimulationConfig sim;
  sim.n_obs = 500;
  sim.dims = 20;
  sim.seed = 606;
  const SurvivalDataset data = simulate_dataset(sim);
  const RiskSetIndex idx = build_risk_index(data);
  const ElasticNetPenalty pen = resolve_preset(PenaltyPreset::HighRidge, idx);

  const double L = estimate_smoothness(data);
  const double gamma = 1.0 / (20.0 * L);
  const std::uint64_t m = 150000;
  const double rho = contraction_rho({L, pen.strong_convexity(), 0.0}, m, gamma);
  if (!(rho < 1.0)) return {false, fmt("contraction factor %.3f not below 1", rho)};

  const auto ref = compute_reference(data, idx, pen, std::nullopt);

  SolverConfig cfg;
  cfg.phases = 15;
  cfg.phase_length = m;
  cfg.step_size = gamma;
  cfg.schedule = ScheduleSpec::theory_strong(2.0, 0.5);
  cfg.estimator = EstimatorKind::ImhAdaptive;
  cfg.seed = 66;
  InnerProductLedger ledger;
  const auto run = two_svrg(data, idx, pen, cfg, std::vector<double>(20, 0.0), ledger);

  if (run.trace.checkpoints.size() != 16)
    return {false, fmt("expected 16 checkpoints, got %zu", run.trace.checkpoints.size())};
  const auto log_gap = [&](std::size_t k) {
    const double g = run.trace.checkpoints[k].objective - ref.f_star;
    return std::log10(std::max(g, 1e-13));
  };
  const double decay = (log_gap(3) - log_gap(12)) / 9.0;
  const double final_gap = run.trace.checkpoints[15].objective - ref.f_star;
  return {decay >= 0.3 && final_gap <= 1e-6,
          fmt("rho %.3f, mean log10 decay %.2f/phase over phases 3-12 (>= 0.3), "
              "final gap %.2e (<= 1e-6)",
              rho, decay, final_gap)};
}

// --- 7: without strong convexity, K * gap stays bounded. --------------------

Outcome sublinear_averaged_decay() {
  SimulationConfig sim;
  sim.n_obs = 2000;
  sim.dims = 6;
  sim.seed = 707;
  const SurvivalDataset data = simulate_dataset(sim);
  const RiskSetIndex idx = build_risk_index(data);
  const ElasticNetPenalty pen(0.0, 0.0);

  const auto ref = compute_reference(data, idx, pen, std::nullopt);
  const double L = estimate_smoothness(data);

  double lo = 1e300, hi = 0.0;
  std::string gaps;
  for (const std::uint64_t K : {5, 10, 20, 40}) {
    SolverConfig cfg;
    cfg.phases = K;
    cfg.phase_length = 100;
    cfg.step_size = 0.05 / L;
    cfg.schedule = ScheduleSpec::theory_convex(2.0);
    cfg.estimator = EstimatorKind::Nis;
    cfg.seed = 77;
    InnerProductLedger ledger;
    const auto run = two_svrg(data, idx, pen, cfg, std::vector<double>(6, 0.0), ledger);
    const auto avg = averaged_iterate(run.phase_iterates, K);
    InnerProductLedger scratch;
    const double gap = objective(data, idx, pen, avg, scratch) - ref.f_star;
    const double scaled = static_cast<double>(K) * gap;
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
    gaps += fmt(" K=%llu:%.3e", static_cast<unsigned long long>(K), scaled);
  }
  const double ratio = hi / lo;
  return {lo > 0.0 && ratio <= 5.0,
          fmt("K*gap%s, max/min %.2f (<= 5)", gaps.c_str(), ratio)};
}

// --- 8: ledger deltas match the documented costs exactly. -------------------

Outcome accounting_exactness() {
  Rng rng(108);
  const auto inst = ladder_instance(rng, 25, 3);
  const std::vector<double> theta = {0.2, -0.1, 0.3};
  InnerProductLedger ledger;

  const std::uint64_t before_full = ledger.count();
  (void)full_gradient(inst.data, inst.idx, theta, ledger);
  const std::uint64_t full_cost = ledger.count() - before_full;
  const bool full_ok = full_cost == inst.data.n_patients();

  const std::vector<std::size_t> batch = {2, 7, 11};
  const std::uint64_t before_mb = ledger.count();
  (void)minibatch_gradient(inst.data, inst.idx, batch, theta, ledger);
  const std::uint64_t mb_cost = ledger.count() - before_mb;
  std::size_t widest = 0;
  for (const std::size_t f : batch) widest = std::max(widest, inst.idx.risk_size(f));
  const bool mb_ok = mb_cost == widest;

  const PhaseCache cache(inst.data, inst.idx, std::vector<double>(3, 0.0), ledger);
  const std::size_t f = inst.idx.n_failures() - 1;
  const auto imh_cost = [&](std::uint64_t iters) {
    Rng r(11);
    const std::uint64_t before = ledger.count();
    (void)imh_estimate(inst.data, inst.idx, cache, f, theta,
                       EstimatorConfig(EstimatorKind::ImhUniform, iters), r, ledger);
    return ledger.count() - before;
  };
  // One product per proposal, plus one for the starting state.
  const bool imh_ok = imh_cost(1) == 2 && imh_cost(11) == 12;

  const auto nis_cost = [&](std::uint64_t iters) {
    Rng r(12);
    const std::uint64_t before = ledger.count();
    (void)nis_estimate(inst.data, inst.idx, cache, f, theta,
                       EstimatorConfig(EstimatorKind::Nis, iters), r, ledger);
    return ledger.count() - before;
  };
  const bool nis_ok = nis_cost(1) == 1 && nis_cost(9) == 9;

  return {full_ok && mb_ok && imh_ok && nis_ok,
          fmt("full %llu==n_pat %zu, minibatch %llu==max|R| %zu, imh 1/proposal+start, "
              "nis 1/draw",
              static_cast<unsigned long long>(full_cost), inst.data.n_patients(),
              static_cast<unsigned long long>(mb_cost), widest)};
}

// --- 9: the simulator obeys its own law. ------------------------------------

Outcome simulation_law_checks() {
  Rng rng(109);
  const std::size_t n = 20000;
  const double crit = std::sqrt(-0.5 * std::log(0.005)) / std::sqrt(static_cast<double>(n));

  double worst_ks = 0.0;
  const std::size_t d = 3;
  for (int variant = 0; variant < 3; ++variant) {
    const double shape = variant == 0 ? 1.0 : 2.0;
    std::vector<double> theta(d, 0.0);
    if (variant == 2)
      for (double& v : theta) v = 0.5 * rng.normal();
    const std::vector<double> feats = gen_features(n, d, 0.4, rng);
    const std::vector<double> times = gen_failure_times(feats, n, d, theta, shape, rng);
    // The cumulative hazard exp(x.theta) t^shape must be standard exponential.
    std::vector<double> hazard(n);
    for (std::size_t i = 0; i < n; ++i) {
      double xt = 0.0;
      for (std::size_t j = 0; j < d; ++j) xt += feats[i * d + j] * theta[j];
      hazard[i] = std::exp(xt) * std::pow(times[i], shape);
    }
    worst_ks = std::max(worst_ks, ks_vs_exponential(std::move(hazard)));
  }

  // Lag-1 autocorrelation of the feature rows.
  const std::size_t big = 100000, cols = 6;
  const std::vector<double> feats = gen_features(big, cols, 0.5, rng);
  double sum = 0.0, sq_a = 0.0, sq_b = 0.0;
  for (std::size_t i = 0; i < big; ++i)
    for (std::size_t j = 0; j + 1 < cols; ++j) {
      const double a = feats[i * cols + j], b = feats[i * cols + j + 1];
      sum += a * b;
      sq_a += a * a;
      sq_b += b * b;
    }
  const double corr = sum / std::sqrt(sq_a * sq_b);
  const bool corr_ok = std::abs(corr - 0.5) <= 0.01;

  return {worst_ks <= crit && corr_ok,
          fmt("worst KS %.4f (crit %.4f at level 0.01), lag-1 corr %.4f (0.5 +/- 0.01)",
              worst_ks, crit, corr)};
}

// --- 10: the hybrid beats plain minibatch SVRG to 1e-4 on most seeds. -------

std::uint64_t crossing_cost(const ConvergenceTrace& trace, double f_star, double tol) {
  for (const TraceCheckpoint& c : trace.checkpoints)
    if (c.objective - f_star <= tol) return c.inner_products;
  return kUnlimited;
}

Outcome directional_head_to_head() {
  SimulationConfig sim;
  sim.n_obs = 1000;
  sim.dims = 50;
  sim.seed = 1010;
  const SurvivalDataset data = simulate_dataset(sim);
  const RiskSetIndex idx = build_risk_index(data);
  const ElasticNetPenalty pen = resolve_preset(PenaltyPreset::HighRidge, idx);
  const auto ref = compute_reference(data, idx, pen, std::nullopt);

  const double L = estimate_smoothness(data);
  const std::uint64_t n_fail = idx.n_failures();
  // Generous enough for the minibatch baseline to finish too: a 10%-of-the-
  // failures batch costs nearly a full pass per step here, so it needs tens
  // of millions of products to reach 1e-4.
  const std::uint64_t budget = 40000000;

  SolverEntry hybrid;
  hybrid.name = "hybrid";
  hybrid.algorithm = "hsvrg";
  hybrid.config.phases = 25;
  hybrid.config.phase_length = n_fail;
  hybrid.config.switch_phase = 5;
  hybrid.config.minibatch_size = std::max<std::uint64_t>(1, n_fail / 10);
  hybrid.config.schedule = ScheduleSpec::practical();
  hybrid.config.estimator = EstimatorKind::Nis;
  hybrid.config.checkpoint_every = 50;
  hybrid.gamma_grid = {3.2 / L, 1.6 / L, 0.4 / L, 0.1 / L};

  // Enough phases that the shared budget, not the phase count, ends the run.
  SolverEntry mb;
  mb.name = "minibatch";
  mb.algorithm = "svrg_mb";
  mb.config.phases = 3000;
  mb.config.phase_length = n_fail;
  mb.config.minibatch_size = std::max<std::uint64_t>(1, n_fail / 10);
  mb.config.checkpoint_every = 1;
  mb.gamma_grid = hybrid.gamma_grid;

  const double gamma_h = pick_step_size(data, idx, pen, hybrid, 200000, 0);
  const double gamma_m = pick_step_size(data, idx, pen, mb, 200000, 0);
  hybrid.config.step_size = gamma_h;
  mb.config.step_size = gamma_m;

  int wins = 0;
  std::vector<double> h_costs, m_costs;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SolverConfig ch = hybrid.config;
    ch.seed = seed;
    InnerProductLedger lh;
    const auto rh = hsvrg(data, idx, pen, ch, std::vector<double>(50, 0.0), lh, budget);
    const std::uint64_t cost_h = crossing_cost(rh.trace, ref.f_star, 1e-4);

    SolverConfig cm = mb.config;
    cm.seed = seed;
    InnerProductLedger lm;
    const auto rm =
        prox_svrg_minibatch(data, idx, pen, cm, std::vector<double>(50, 0.0), lm, budget);
    const std::uint64_t cost_m = crossing_cost(rm.trace, ref.f_star, 1e-4);

    if (cost_h < cost_m) ++wins;
    h_costs.push_back(static_cast<double>(cost_h));
    m_costs.push_back(static_cast<double>(cost_m));
  }
  const auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  return {wins >= 6,
          fmt("hybrid first to gap 1e-4 on %d/10 seeds (need >= 6); median products "
              "%.3g vs %.3g (gamma %.2e vs %.2e)",
              wins, median(h_costs), median(m_costs), gamma_h, gamma_m)};
}

struct Criterion {
  const char* name;
  Outcome (*fn)();
};

constexpr Criterion kCriteria[] = {
    {"gradient oracle equivalence", gradient_oracle_equivalence},
    {"prox correctness", prox_correctness},
    {"estimator error scaling", estimator_error_scaling},
    {"chain stationarity", chain_stationarity},
    {"exact-estimator reduction", exact_estimator_reduction},
    {"geometric phase decay", geometric_phase_decay},
    {"sublinear averaged decay", sublinear_averaged_decay},
    {"accounting exactness", accounting_exactness},
    {"simulation law checks", simulation_law_checks},
    {"directional head-to-head", directional_head_to_head},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc == 3 && std::strcmp(argv[1], "--criterion") == 0) {
    only = std::atoi(argv[2]);
    if (only < 1 || only > 10) {
      std::fprintf(stderr, "criterion must be 1..10\n");
      return 2;
    }
  } else if (argc != 1) {
    std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
    return 2;
  }

  bool hard_fail = false;
  bool soft_fail = false;
  for (int i = 1; i <= 10; ++i) {
    if (only != 0 && i != only) continue;
    const auto start = std::chrono::steady_clock::now();
    const Outcome o = kCriteria[i - 1].fn();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d [%s]: %s  %s  (%.1fs)\n", i, kCriteria[i - 1].name,
                o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) (i == 10 ? soft_fail : hard_fail) = true;
  }
  if (soft_fail)
    std::printf("note: criterion 10 is directional; its failure flags tuning, "
                "not incorrectness\n");
  if (only != 0) return (hard_fail || soft_fail) ? 1 : 0;
  return hard_fail ? 1 : 0;
}
