#pragma once
// Monte Carlo driver: runs K trajectories under a scheme, forms the unbiased
// exit-probability estimate
//
//   theta_hat = (1/k_used) sum 1{exited} exp(log_weight),
//
// its per-path sample standard deviation, the relative error per sample
// (sample_std / estimate; the std of the estimator itself is sample_std /
// sqrt(K), so this matches sqrt(K) * std(estimator) / mean), the 95% CI, and
// exit diagnostics. Zero-success runs report the sentinel re = sqrt(K).
//
// Determinism: trajectories are processed in fixed chunks of 256; each chunk
// accumulates compensated (Neumaier) sums, workers claim whole chunks, and
// chunk partials are folded in index order, so reports are bitwise identical
// for any thread count.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "spex/controls.hpp"
#include "spex/dynamics.hpp"
#include "spex/model.hpp"

namespace spex {

struct EstimateReport {
  double estimate = 0.0;
  double sample_std = 0.0;
  double re_per_sample = 0.0;
  std::array<double, 2> ci95{0.0, 0.0};
  std::size_t k_used = 0;  // K minus invalid trajectories
  double exit_fraction = 0.0;
  double e1_concentration = 0.0;  // mean <X(tau),e1>^2 / L^2 over exits; NaN if none
  std::size_t invalid_count = 0;
  double wall_time_s = 0.0;
};

namespace detail {

struct Neumaier {
  double s = 0.0;
  double c = 0.0;
  void add(double v) {
    const double t = s + v;
    if (std::abs(s) >= std::abs(v))
      c += (s - t) + v;
    else
      c += (v - t) + s;
    s = t;
  }
  double get() const { return s + c; }
};

struct ChunkSums {
  Neumaier v;    // weighted exit indicators
  Neumaier v2;   // their squares
  Neumaier e1;   // e1 shares over exits
  std::uint64_t n_exit = 0;
  std::uint64_t n_invalid = 0;
};

inline constexpr std::size_t chunk_size = 256;

}  // namespace detail

// Core driver over any control satisfying the dynamics Control concept.
// context selects the stream family (0 for direct estimates; sweep derives
// one per cell). Throws std::invalid_argument for K < 2 or threads < 1 and
// std::runtime_error when every trajectory is invalid.
template <class Control>
EstimateReport estimate_with_control(const SpectralModel& m,
                                     const SimConfig& sim, const Control& ctrl,
                                     std::size_t K, std::uint64_t seed,
                                     unsigned threads = 1,
                                     WeightMode wm = WeightMode::joint,
                                     std::uint64_t context = 0) {
  if (K < 2) throw std::invalid_argument("estimate: need K >= 2");
  if (threads < 1) throw std::invalid_argument("estimate: need threads >= 1");
  sim.validate(m);

  const auto t_begin = std::chrono::steady_clock::now();
  const StepCoeffs sc = StepCoeffs::make(m, sim);
  const std::array<std::uint64_t, 2> key{seed, context};
  const double l_sq = sim.radius * sim.radius;

  const std::size_t n_chunks =
      (K + detail::chunk_size - 1) / detail::chunk_size;
  std::vector<detail::ChunkSums> partials(n_chunks);
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      const std::size_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= n_chunks) return;
      detail::ChunkSums& p = partials[c];
      const std::size_t lo = c * detail::chunk_size;
      const std::size_t hi = std::min(K, lo + detail::chunk_size);
      for (std::size_t i = lo; i < hi; ++i) {
        const TrajectoryOutcome o =
            run_trajectory(m, sim, ctrl, key, i, wm, &sc);
        if (!o.valid) {
          ++p.n_invalid;
          continue;
        }
        double v = 0.0;
        if (o.exited) {
          ++p.n_exit;
          v = std::exp(o.log_weight);
          const double x1 = o.exit_coeffs[0];
          p.e1.add(x1 * x1 / l_sq);
        }
        p.v.add(v);
        p.v2.add(v * v);
      }
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  detail::Neumaier sum_v, sum_v2, sum_e1;
  std::uint64_t n_exit = 0, n_invalid = 0;
  for (const auto& p : partials) {
    sum_v.add(p.v.get());
    sum_v2.add(p.v2.get());
    sum_e1.add(p.e1.get());
    n_exit += p.n_exit;
    n_invalid += p.n_invalid;
  }

  if (n_invalid >= K) throw std::runtime_error("estimate: all trajectories invalid");

  EstimateReport r;
  r.invalid_count = n_invalid;
  r.k_used = K - n_invalid;
  const double ku = static_cast<double>(r.k_used);
  const double sv = sum_v.get();
  r.estimate = sv / ku;
  double var = 0.0;
  if (r.k_used > 1) var = (sum_v2.get() - sv * sv / ku) / (ku - 1.0);
  if (var < 0.0) var = 0.0;
  r.sample_std = std::sqrt(var);
  r.re_per_sample = (n_exit > 0 && r.estimate > 0.0)
                        ? r.sample_std / r.estimate
                        : std::sqrt(static_cast<double>(K));
  const double half = 1.96 * r.sample_std / std::sqrt(ku);
  r.ci95 = {r.estimate - half, r.estimate + half};
  r.exit_fraction = static_cast<double>(n_exit) / ku;
  r.e1_concentration = n_exit > 0
                           ? sum_e1.get() / static_cast<double>(n_exit)
                           : std::numeric_limits<double>::quiet_NaN();
  r.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin)
          .count();
  return r;
}

// Scheme-config front end (variant none runs the zero control).
EstimateReport estimate(const SpectralModel& m, const SimConfig& sim,
                        const SchemeConfig& scheme, std::size_t K,
                        std::uint64_t seed, unsigned threads = 1,
                        WeightMode wm = WeightMode::joint,
                        std::uint64_t context = 0);

// Mean over exited outcomes of <X(tau),e1>^2 / L^2; std::nullopt without
// exits. Unweighted: the statistic lives under the sampling measure.
std::optional<double> exit_direction_stat(
    const std::vector<TrajectoryOutcome>& outcomes, double L);

struct SweepCell {
  std::size_t i_eps = 0;
  std::size_t i_t = 0;
  double eps = 0.0;
  double horizon = 0.0;
  bool ok = false;
  std::string error;  // per-cell failure, sweep itself never aborts
  EstimateReport report;
};

// One report per (eps, T) cell. The template's h = horizon/steps is held
// fixed: each cell runs steps = round(T/h). Per-cell streams derive from
// (seed, i_eps, i_t). Throws std::invalid_argument on an empty grid.
std::vector<SweepCell> sweep(const SpectralModel& m, const SimConfig& sim_template,
                             const SchemeConfig& scheme,
                             const std::vector<double>& eps_grid,
                             const std::vector<double>& t_grid, std::size_t K,
                             std::uint64_t seed, unsigned threads = 1,
                             WeightMode wm = WeightMode::joint);

}  // namespace spex
