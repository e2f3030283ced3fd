#include "spex/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spex {

void SimConfig::validate(const SpectralModel& m) const {
  m.validate();
  if (!(eps > 0.0)) throw std::invalid_argument("sim: need eps > 0");
  if (!(horizon > 0.0)) throw std::invalid_argument("sim: need horizon > 0");
  if (!(radius > 0.0)) throw std::invalid_argument("sim: need radius > 0");
  if (steps < 1) throw std::invalid_argument("sim: need steps >= 1");
  if (n_modes < 1 || n_modes > m.n_modes())
    throw std::invalid_argument(
        "sim: n_modes must lie in [1, model truncation]");
  if (!initial.empty()) {
    if (initial.size() != n_modes)
      throw std::invalid_argument(
          "sim: initial state length must equal n_modes");
    double nsq = 0.0;
    for (double v : initial) nsq += v * v;
    if (!(nsq < radius * radius))
      throw std::invalid_argument("sim: initial state must lie inside the ball");
  }
}

StepCoeffs StepCoeffs::make(const SpectralModel& m, const SimConfig& sim) {
  sim.validate(m);
  StepCoeffs sc;
  const std::size_t n = sim.n_modes;
  sc.h = sim.h();
  sc.sqrt_eps = std::sqrt(sim.eps);
  sc.decay.resize(n);
  sc.drive.resize(n);
  sc.noise.resize(n);
  sc.beta_slope.resize(n);
  sc.beta_perp.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double a = m.alphas[j];
    const double l = m.lambdas[j];
    sc.decay[j] = std::exp(-a * sc.h);
    // (1 - e^{-a h})/a doubles as the control-drive factor and the
    // covariance E[dbeta eta] of the raw and convolved increments.
    sc.drive[j] = -std::expm1(-a * sc.h) / a;
    const double s_eta = std::sqrt(-std::expm1(-2.0 * a * sc.h) / (2.0 * a));
    sc.noise[j] = sc.sqrt_eps * l * s_eta;
    sc.beta_slope[j] = sc.drive[j] / s_eta;
    sc.beta_perp[j] =
        std::sqrt(std::max(0.0, sc.h - sc.beta_slope[j] * sc.beta_slope[j]));
  }
  return sc;
}

bool exit_check(const std::vector<double>& state, double L) {
  double nsq = 0.0;
  for (double v : state) nsq += v * v;
  return nsq >= L * L;
}

std::vector<double> step(const std::vector<double>& state,
                         const SpectralModel& m, const SimConfig& sim,
                         const std::vector<double>& control,
                         const std::vector<double>& noise) {
  if (state.size() != sim.n_modes || control.size() != sim.n_modes ||
      noise.size() != sim.n_modes)
    throw std::domain_error("step: vector lengths must equal sim.n_modes");
  const StepCoeffs sc = StepCoeffs::make(m, sim);
  std::vector<double> out(sim.n_modes);
  for (std::size_t j = 0; j < sim.n_modes; ++j)
    out[j] = sc.decay[j] * state[j] + sc.drive[j] * m.lambdas[j] * control[j] +
             sc.noise[j] * noise[j];
  return out;
}

}  // namespace spex
