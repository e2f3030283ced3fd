// End-to-end estimator benchmarks: trajectories per second through the full
// Monte Carlo driver, standard and tilted sampling.

#include <benchmark/benchmark.h>

#include "spex/estimator.hpp"
#include "spex/model.hpp"

namespace {

spex::SimConfig make_sim(double eps, double T, std::size_t steps,
                         std::size_t n) {
  spex::SimConfig s;
  s.eps = eps;
  s.horizon = T;
  s.radius = 1.0;
  s.steps = steps;
  s.n_modes = n;
  return s;
}

void BM_EstimateStandard(benchmark::State& state) {
  const auto m = spex::preset_model("integer-squares", 4);
  const auto sim = make_sim(0.3, 2.0, 100, 4);
  spex::SchemeConfig cfg;
  cfg.variant = spex::SchemeVariant::none;
  const std::size_t K = 1000;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const auto r = spex::estimate(m, sim, cfg, K, seed++);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(K));
}
BENCHMARK(BM_EstimateStandard);

void BM_EstimateScheme2(benchmark::State& state) {
  const auto m = spex::preset_model("integer-squares", 4);
  const auto sim = make_sim(0.3, 2.0, 100, 4);
  spex::SchemeConfig cfg;
  cfg.kappa = 0.4;
  const std::size_t K = 1000;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const auto r = spex::estimate(m, sim, cfg, K, seed++);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(K));
}
BENCHMARK(BM_EstimateScheme2);

void BM_EstimateLargeTruncation(benchmark::State& state) {
  const auto m = spex::preset_model("integer-squares", 100);
  const auto sim = make_sim(0.09, 2.0, 200, 100);
  spex::SchemeConfig cfg;  // scheme2 defaults
  const std::size_t K = 200;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const auto r = spex::estimate(m, sim, cfg, K, seed++);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(K * sim.steps * sim.n_modes));
}
BENCHMARK(BM_EstimateLargeTruncation);

}  // namespace
