#pragma once
// Exponential Euler integration of the controlled Galerkin system under the
// sampling measure, with exit detection on the L2-ball and Girsanov
// log-weight accumulation. Per mode j and step h,
//
//   X'_j = e^{-alpha_j h} X_j + (1 - e^{-alpha_j h})/alpha_j * lambda_j u_j
//          + sqrt(eps) lambda_j sqrt((1 - e^{-2 alpha_j h})/(2 alpha_j)) xi_j
//
// with u frozen at the step's left endpoint. The weight needs the raw
// Brownian increment dbeta_j (variance h) while the state uses the convolved
// increment eta_j (variance s_eta^2, covariance (1 - e^{-alpha_j h})/alpha_j
// with dbeta_j); WeightMode::joint samples the pair exactly as
//
//   eta = s_eta z1,  dbeta = (cov/s_eta) z1 + s_perp z2,
//   s_perp^2 = h - cov^2/s_eta^2,
//
// which keeps the discrete estimator exactly unbiased. WeightMode::diagonal
// substitutes dbeta ~= eta (O(h) weight bias, kept for comparison).
//
// log-weight increment per step: -(1/sqrt(eps)) sum_j u_j dbeta_j
//                                - (h/(2 eps)) sum_j u_j^2,
// nonzero only on the controlled modes.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "spex/model.hpp"
#include "spex/rng.hpp"

namespace spex {

struct SimConfig {
  double eps = 0.1;
  double horizon = 1.0;   // T
  double radius = 1.0;    // L
  std::size_t steps = 100;  // Lambda, h = horizon/steps
  std::size_t n_modes = 1;  // N <= model.n_modes()
  std::vector<double> initial;  // empty = origin; else length n_modes, |x| < L

  double h() const { return horizon / static_cast<double>(steps); }
  void validate(const SpectralModel& m) const;  // throws std::invalid_argument
};

struct TrajectoryOutcome {
  bool exited = false;
  bool valid = true;          // false: overflow or nonfinite state
  std::size_t exit_step = 0;  // 1-based step count at exit; 0 if none
  double exit_time = 0.0;
  std::vector<double> exit_coeffs;
  double log_weight = 0.0;
  double e1_share = 0.0;  // <X(tau),e1>^2 / L^2 when exited (overshoot can push it past 1)
};

enum class WeightMode { joint, diagonal };

// Per-mode step constants, precomputed once per cell.
struct StepCoeffs {
  std::vector<double> decay;       // e^{-alpha h}
  std::vector<double> drive;       // (1 - e^{-alpha h})/alpha
  std::vector<double> noise;       // sqrt(eps) lambda s_eta
  std::vector<double> beta_slope;  // cov/s_eta
  std::vector<double> beta_perp;   // sqrt(max(0, h - beta_slope^2))
  double h = 0.0;
  double sqrt_eps = 0.0;

  static StepCoeffs make(const SpectralModel& m, const SimConfig& sim);
};

// true iff sum x_j^2 >= L^2 (the closed ball's boundary counts as exit).
bool exit_check(const std::vector<double>& state, double L);

// Single exponential Euler step, all vectors of length sim.n_modes; exposed
// for direct testing against the closed form. Throws std::domain_error on
// length mismatch.
std::vector<double> step(const std::vector<double>& state,
                         const SpectralModel& m, const SimConfig& sim,
                         const std::vector<double>& control,
                         const std::vector<double>& noise);

namespace detail {
inline constexpr double overflow_factor = 1e3;  // |x| > 1e3 L flags invalid
}

// Control concept: n_controlled(), controlled_modes0() -> 0-based indices,
// fill(t, x, u) writing coefficients parallel to controlled_modes0().
struct ZeroControl {
  std::size_t n_controlled() const { return 0; }
  const std::vector<std::size_t>& controlled_modes0() const {
    static const std::vector<std::size_t> none;
    return none;
  }
  void fill(double, const double*, double*) const {}
};

template <class Control>
TrajectoryOutcome run_trajectory(const SpectralModel& m, const SimConfig& sim,
                                 const Control& ctrl,
                                 const std::array<std::uint64_t, 2>& key,
                                 std::uint64_t traj_index,
                                 WeightMode wm = WeightMode::joint,
                                 const StepCoeffs* pre = nullptr) {
  const std::size_t n = sim.n_modes;
  StepCoeffs local;
  if (pre == nullptr) {
    local = StepCoeffs::make(m, sim);
    pre = &local;
  }
  const StepCoeffs& sc = *pre;
  const double l_sq = sim.radius * sim.radius;
  const double overflow_sq =
      detail::overflow_factor * detail::overflow_factor * l_sq;
  const double inv_sqrt_eps = 1.0 / sc.sqrt_eps;
  const double half_h_over_eps = 0.5 * sc.h / sim.eps;

  TrajectoryOutcome out;
  std::vector<double> x(n, 0.0);
  if (!sim.initial.empty()) x = sim.initial;

  const std::size_t nc = ctrl.n_controlled();
  const std::vector<std::size_t>& cmodes = ctrl.controlled_modes0();
  std::vector<double> u(nc, 0.0);
  std::vector<double> z_state(nc, 0.0);  // state-lane normal per controlled mode
  if (nc > 0xfe)
    throw std::domain_error("run_trajectory: too many controlled modes");
  std::vector<std::uint8_t> ctrl_slot(n, 0xff);
  for (std::size_t ci = 0; ci < nc; ++ci) {
    if (cmodes[ci] >= n)
      throw std::domain_error(
          "run_trajectory: controlled mode outside the simulated truncation");
    ctrl_slot[cmodes[ci]] = static_cast<std::uint8_t>(ci);
  }

  double logw = 0.0;
  for (std::size_t k = 0; k < sim.steps; ++k) {
    const double t = static_cast<double>(k) * sc.h;
    if (nc > 0) ctrl.fill(t, x.data(), u.data());

    double nsq = 0.0;
    for (std::size_t b = 0; 4 * b < n; ++b) {
      const auto z = normal_quad(
          make_counter(traj_index, k, b, purpose_state_noise), key);
      const std::size_t j_end = std::min(n, 4 * b + 4);
      for (std::size_t j = 4 * b; j < j_end; ++j) {
        const double zj = z[j - 4 * b];
        double xj = sc.decay[j] * x[j] + sc.noise[j] * zj;
        if (ctrl_slot[j] != 0xff) z_state[ctrl_slot[j]] = zj;
        x[j] = xj;
        nsq += xj * xj;
      }
    }

    if (nc > 0) {
      for (std::size_t ci = 0; ci < nc; ++ci) {
        const std::size_t j = cmodes[ci];
        const double uj = u[ci];
        nsq -= x[j] * x[j];
        x[j] += sc.drive[j] * m.lambdas[j] * uj;
        nsq += x[j] * x[j];

        double dbeta;
        if (wm == WeightMode::joint) {
          // Orthogonal component from the weight-noise stream, lane ci.
          const auto zw = normal_quad(
              make_counter(traj_index, k, ci / 4, purpose_weight_noise), key);
          dbeta = sc.beta_slope[j] * z_state[ci] +
                  sc.beta_perp[j] * zw[ci % 4];
        } else {
          // dbeta ~= eta substitution; biased at O(h).
          dbeta = sc.noise[j] / (sc.sqrt_eps * m.lambdas[j]) * z_state[ci];
        }
        logw -= uj * dbeta * inv_sqrt_eps + half_h_over_eps * uj * uj;
      }
    }

    if (!std::isfinite(nsq) || nsq > overflow_sq) {
      out.valid = false;
      out.log_weight = logw;
      return out;
    }
    if (nsq >= l_sq) {
      out.exited = true;
      out.exit_step = k + 1;
      out.exit_time = static_cast<double>(k + 1) * sc.h;
      out.exit_coeffs = x;
      out.e1_share = (x[0] * x[0]) / l_sq;
      out.log_weight = logw;
      return out;
    }
  }
  out.log_weight = logw;
  return out;
}

}  // namespace spex
