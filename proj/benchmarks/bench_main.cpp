#include <benchmark/benchmark.h>

#include <vector>

#include "mvsde/basis.hpp"
#include "mvsde/mlmc.hpp"
#include "mvsde/model.hpp"
#include "mvsde/particle.hpp"
#include "mvsde/rng.hpp"

namespace {

using namespace mvsde;

void BM_PhiAll(benchmark::State& state) {
  std::vector<double> out(static_cast<std::size_t>(state.range(0)) + 1);
  double x = -3.0;
  for (auto _ : state) {
    phi_all(x, out);
    benchmark::DoNotOptimize(out.data());
    x = x > 3.0 ? -3.0 : x + 0.01;
  }
}
BENCHMARK(BM_PhiAll)->Arg(10)->Arg(20)->Arg(40);

void BM_NormalPair(benchmark::State& state) {
  const auto key = family_key(1, 0, 0, StreamPurpose::increment);
  std::uint64_t block = 0;
  for (auto _ : state) benchmark::DoNotOptimize(normal_pair(key, 7, block++));
}
BENCHMARK(BM_NormalPair);

void BM_NormalIncrements(benchmark::State& state) {
  const StreamKey key{1, 0, 0, 3, StreamPurpose::increment};
  for (auto _ : state) benchmark::DoNotOptimize(normal_increments(key, static_cast<std::size_t>(state.range(0)), 0.01));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NormalIncrements)->Arg(1024);

ParticleEnsemble spread_ensemble(std::size_t n) {
  ParticleEnsemble ens;
  ens.states.resize(n);
  for (std::size_t i = 0; i < n; ++i) ens.states[i] = -2.0 + 4.0 * static_cast<double>(i) / static_cast<double>(n);
  return ens;
}

void BM_PpmStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const int K = static_cast<int>(state.range(1));
  const auto pm = gaussian_projected_model(0.1, PointMass{0.5}, 1.0, K);
  const auto ens = spread_ensemble(n);
  const std::vector<double> dW(n, 0.01);
  for (auto _ : state) {
    CostLedger cost;
    benchmark::DoNotOptimize(ppm_step(ens, pm, dW, 0.01, cost));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PpmStep)->Args({500, 10})->Args({10000, 10})->Args({10000, 20});

void BM_ChaosStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto model = gaussian_interaction_model(0.1, PointMass{0.5}, 1.0);
  const auto ens = spread_ensemble(n);
  const std::vector<double> dW(n, 0.01);
  for (auto _ : state) {
    CostLedger cost;
    benchmark::DoNotOptimize(chaos_step(ens, model, dW, 0.01, cost));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ChaosStep)->Arg(500)->Arg(2000);

void BM_MlmcLevel(benchmark::State& state) {
  const int level = static_cast<int>(state.range(0));
  const auto pm = gaussian_projected_model(0.1, PointMass{0.5}, 1.0, 10);
  PicardConfig pc;
  pc.table_level = 5;
  const auto frozen = initial_table(pc, pm);
  MultilevelRequest req;
  req.samples.assign(static_cast<std::size_t>(level) + 1, 0);
  req.samples.back() = 1000;
  for (std::size_t l = 0; l + 1 < req.samples.size(); ++l) req.samples[l] = 1;
  req.target_level = 5;
  req.payoff = Payoff::basis;
  req.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(multilevel_estimate(frozen, pm, req));
}
BENCHMARK(BM_MlmcLevel)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
