// Noise pipeline microbenchmarks: raw block rate and normal generation.

#include <array>
#include <cstdint>

#include <benchmark/benchmark.h>

#include "spex/rng.hpp"

namespace {

void BM_PhiloxBlock(benchmark::State& state) {
  const std::array<std::uint64_t, 2> key{42, 0};
  std::uint64_t i = 0;
  for (auto _ : state) {
    const auto block = spex::philox4x64({i++, 0, 0, 0}, key);
    benchmark::DoNotOptimize(block);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * 4);
}
BENCHMARK(BM_PhiloxBlock);

void BM_NormalQuad(benchmark::State& state) {
  const std::array<std::uint64_t, 2> key{42, 0};
  std::uint64_t i = 0;
  for (auto _ : state) {
    const auto z = spex::normal_quad({i++, 0, 0, 0}, key);
    benchmark::DoNotOptimize(z);
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * 4);
}
BENCHMARK(BM_NormalQuad);

void BM_Mix64(benchmark::State& state) {
  std::uint64_t x = 1;
  for (auto _ : state) {
    x = spex::mix64(x);
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_Mix64);

}  // namespace
