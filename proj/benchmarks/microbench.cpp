// Microbenchmarks for the hot paths: risk-set sweeps, anchor caching, the
// per-step gradient estimators, and the proximal map. All run on one shared
// simulated dataset so numbers are comparable across kernels.

#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "coxsvrg/cox_model.hpp"
#include "coxsvrg/estimators.hpp"
#include "coxsvrg/penalty.hpp"
#include "coxsvrg/simulate.hpp"

namespace {

using namespace coxsvrg;

struct Fixture {
  SurvivalDataset data;
  RiskSetIndex idx;
  std::vector<double> theta;
  PhaseCache cache;

  static Fixture make() {
    SimulationConfig cfg;
    cfg.n_obs = 2000;
    cfg.dims = 50;
    cfg.seed = 99;
    SurvivalDataset data = simulate_dataset(cfg);
    RiskSetIndex idx = build_risk_index(data);
    std::vector<double> theta(50);
    Rng rng(7);
    for (double& v : theta) v = 0.1 * rng.normal();
    InnerProductLedger ledger;
    PhaseCache cache(data, idx, theta, ledger);
    return {std::move(data), std::move(idx), std::move(theta), std::move(cache)};
  }
};

const Fixture& fixture() {
  static const Fixture fx = Fixture::make();
  return fx;
}

void BM_FullGradient(benchmark::State& state) {
  const Fixture& fx = fixture();
  InnerProductLedger ledger;
  for (auto _ : state) {
    auto g = full_gradient(fx.data, fx.idx, fx.theta, ledger);
    benchmark::DoNotOptimize(g.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(fx.idx.n_active()));
}
BENCHMARK(BM_FullGradient);

void BM_SubfunctionGradientLargest(benchmark::State& state) {
  const Fixture& fx = fixture();
  InnerProductLedger ledger;
  const std::size_t f = fx.idx.n_failures() - 1;
  for (auto _ : state) {
    auto g = subfunction_gradient(fx.data, fx.idx, f, fx.theta, ledger);
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(BM_SubfunctionGradientLargest);

void BM_PhaseCacheBuild(benchmark::State& state) {
  const Fixture& fx = fixture();
  InnerProductLedger ledger;
  for (auto _ : state) {
    PhaseCache cache(fx.data, fx.idx, fx.theta, ledger);
    benchmark::DoNotOptimize(cache.anchor_full_gradient().data());
  }
}
BENCHMARK(BM_PhaseCacheBuild);

void BM_EstimatorStep(benchmark::State& state, EstimatorKind kind) {
  const Fixture& fx = fixture();
  InnerProductLedger ledger;
  Rng rng(11);
  const EstimatorConfig cfg(kind, static_cast<std::uint64_t>(state.range(0)));
  const std::size_t f = fx.idx.n_failures() - 1;
  std::vector<double> theta = fx.theta;
  theta[0] += 0.05;
  for (auto _ : state) {
    auto g = mcmc_estimate(fx.data, fx.idx, fx.cache, f, theta, cfg, rng, ledger);
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK_CAPTURE(BM_EstimatorStep, nis, EstimatorKind::Nis)->Arg(4)->Arg(16)->Arg(64);
BENCHMARK_CAPTURE(BM_EstimatorStep, imh_uniform, EstimatorKind::ImhUniform)
    ->Arg(4)
    ->Arg(16)
    ->Arg(64);
BENCHMARK_CAPTURE(BM_EstimatorStep, imh_adaptive, EstimatorKind::ImhAdaptive)
    ->Arg(4)
    ->Arg(16)
    ->Arg(64);

void BM_SoftmaxAnchorDraw(benchmark::State& state) {
  const Fixture& fx = fixture();
  Rng rng(13);
  const std::size_t f = fx.idx.n_failures() - 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fx.cache.sample_anchor_softmax(f, rng));
  }
}
BENCHMARK(BM_SoftmaxAnchorDraw);

void BM_ElasticNetProx(benchmark::State& state) {
  const ElasticNetPenalty pen(0.05, 0.5);
  Rng rng(17);
  std::vector<double> base(50);
  for (double& v : base) v = rng.normal();
  std::vector<double> work(50);
  for (auto _ : state) {
    work = base;
    pen.prox_inplace(work, 0.01);
    benchmark::DoNotOptimize(work.data());
  }
}
BENCHMARK(BM_ElasticNetProx);

}  // namespace

BENCHMARK_MAIN();
