#include "spex/galerkin.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "spex/rng.hpp"

namespace spex {

double tail_sum(const TailGrowth& tail, std::size_t N, double gamma) {
  const double s = 2.0 * tail.q + tail.p * gamma;
  if (!(s > 1.0))
    throw std::domain_error("tail_sum: series diverges, need 2q + p*gamma > 1");
  const double scale = tail.d * tail.d * std::pow(tail.c, -gamma);
  // Explicit partial sum, smallest terms first, then a midpoint-rule integral
  // remainder; the midpoint correction keeps the error far below 1e-9.
  constexpr std::size_t k_explicit = 1000000;
  double acc = 0.0;
  for (std::size_t k = N + k_explicit; k > N; --k)
    acc += std::pow(static_cast<double>(k), -s);
  const double edge = static_cast<double>(N + k_explicit) + 0.5;
  acc += std::pow(edge, 1.0 - s) / (s - 1.0);
  return scale * acc;
}

double tail_bound(const SpectralModel& model_full, std::size_t N, double gamma,
                  double eps, double T, const std::vector<double>& x) {
  model_full.validate();
  if (!(gamma > 0.5 && gamma < 1.0))
    throw std::domain_error("tail_bound: need gamma in (1/2, 1)");
  if (!(eps > 0.0)) throw std::domain_error("tail_bound: need eps > 0");
  if (!(T > 0.0)) throw std::domain_error("tail_bound: need T > 0");
  if (N < 1) throw std::invalid_argument("tail_bound: need N >= 1");
  const std::size_t n_listed = model_full.n_modes();
  if (n_listed <= N && !model_full.tail)
    throw std::invalid_argument(
        "tail_bound: the model lists no modes past N and carries no symbolic "
        "tail");

  double rsq = 0.0;
  for (std::size_t k = N; k < x.size(); ++k) rsq += x[k] * x[k];

  double tsum = 0.0;
  for (std::size_t k = N + 1; k <= n_listed; ++k) {
    const double l = model_full.lambdas[k - 1];
    tsum += l * l * std::pow(model_full.alphas[k - 1], -gamma);
  }
  if (model_full.tail)
    tsum += tail_sum(*model_full.tail, std::max(N, n_listed), gamma);
  return std::sqrt(rsq) + std::sqrt(eps) * T * std::sqrt(tsum);
}

double coupled_discrepancy(const SpectralModel& model_full,
                           const SimConfig& sim, std::size_t K,
                           std::uint64_t seed) {
  sim.validate(model_full);
  const std::size_t N = sim.n_modes;
  if (model_full.n_modes() < 2 * N)
    throw std::invalid_argument(
        "coupled_discrepancy: the model must list at least 2N modes");
  if (K < 1) throw std::invalid_argument("coupled_discrepancy: need K >= 1");

  // The two resolutions share modes 1..N exactly (identical streams under
  // zero control), so the discrepancy is carried by modes N+1..2N alone.
  // Streams are addressed by global mode index: block g/4, lane g%4, exactly
  // as a full 2N-mode run would draw them.
  const double h = sim.h();
  const double sqrt_eps = std::sqrt(sim.eps);
  std::vector<double> decay(N), noise(N);
  for (std::size_t j = 0; j < N; ++j) {
    const double a = model_full.alphas[N + j];
    const double l = model_full.lambdas[N + j];
    decay[j] = std::exp(-a * h);
    noise[j] = sqrt_eps * l * std::sqrt(-std::expm1(-2.0 * a * h) / (2.0 * a));
  }

  const std::array<std::uint64_t, 2> key{seed, 0};
  double acc = 0.0;
  std::vector<double> x(N);
  for (std::size_t i = 0; i < K; ++i) {
    std::fill(x.begin(), x.end(), 0.0);
    double sup_sq = 0.0;
    for (std::size_t k = 0; k < sim.steps; ++k) {
      double nsq = 0.0;
      for (std::size_t j = 0; j < N;) {
        const std::size_t g = N + j;
        const auto z =
            normal_quad(make_counter(i, k, g / 4, purpose_state_noise), key);
        for (std::size_t lane = g % 4; lane < 4 && j < N; ++lane, ++j) {
          const double xj = decay[j] * x[j] + noise[j] * z[lane];
          x[j] = xj;
          nsq += xj * xj;
        }
      }
      sup_sq = std::max(sup_sq, nsq);
    }
    acc += std::sqrt(sup_sq);
  }
  return acc / static_cast<double>(K);
}

DiscrepancyReport discrepancy_report(const SpectralModel& model_full,
                                     const SimConfig& sim, double gamma,
                                     std::size_t K, std::uint64_t seed) {
  DiscrepancyReport r;
  r.n_coarse = sim.n_modes;
  r.n_fine = 2 * sim.n_modes;
  r.gamma = gamma;
  r.eps = sim.eps;
  r.horizon = sim.horizon;
  r.analytic_bound =
      tail_bound(model_full, sim.n_modes, gamma, sim.eps, sim.horizon, {});
  r.empirical_sup_mean = coupled_discrepancy(model_full, sim, K, seed);
  r.ratio = r.empirical_sup_mean / r.analytic_bound;
  return r;
}

}  // namespace spex
