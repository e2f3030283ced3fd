// Hot-loop benchmarks: whole-trajectory cost per mode-step at small and large
// truncations, uncontrolled and controlled.

#include <cstdint>

#include <benchmark/benchmark.h>

#include "spex/controls.hpp"
#include "spex/dynamics.hpp"
#include "spex/model.hpp"

namespace {

spex::SimConfig make_sim(double eps, double T, std::size_t steps,
                         std::size_t n) {
  spex::SimConfig s;
  s.eps = eps;
  s.horizon = T;
  s.radius = 50.0;  // keep trajectories alive for the full horizon
  s.steps = steps;
  s.n_modes = n;
  return s;
}

void BM_TrajectoryUncontrolled(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const auto m = spex::preset_model("integer-squares", n);
  const auto sim = make_sim(0.09, 2.0, 200, n);
  const auto sc = spex::StepCoeffs::make(m, sim);
  std::uint64_t traj = 0;
  for (auto _ : state) {
    const auto out = spex::run_trajectory(m, sim, spex::ZeroControl{}, {7, 0},
                                          traj++, spex::WeightMode::joint, &sc);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(sim.steps * n));
}
BENCHMARK(BM_TrajectoryUncontrolled)->Arg(4)->Arg(100);

void BM_TrajectoryControlled(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const auto m = spex::preset_model("integer-squares", n);
  const auto sim = make_sim(0.09, 2.0, 200, n);
  spex::SchemeConfig cfg;  // scheme2 defaults
  const spex::SchemeControl ctrl(m, cfg, sim.eps, sim.radius, sim.horizon);
  const auto sc = spex::StepCoeffs::make(m, sim);
  std::uint64_t traj = 0;
  for (auto _ : state) {
    const auto out = spex::run_trajectory(m, sim, ctrl, {7, 0}, traj++,
                                          spex::WeightMode::joint, &sc);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(sim.steps * n));
}
BENCHMARK(BM_TrajectoryControlled)->Arg(4)->Arg(100);

}  // namespace
