#include "spex/variational.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spex {

double minimizer_value(const SpectralModel& m, std::size_t k, double t,
                       double z_k, double T) {
  if (k < 1 || k > m.n_modes())
    throw std::domain_error("minimizer_value: mode index out of range");
  if (!(T > 0.0)) throw std::domain_error("minimizer_value: need T > 0");
  if (!(t >= 0.0 && t <= T))
    throw std::domain_error("minimizer_value: need t in [0, T]");
  const double a = m.alphas[k - 1];
  const double num = std::exp(-a * (T - t)) - std::exp(-a * (t + T));
  const double denom = -std::expm1(-2.0 * a * T);
  return z_k * num / denom;
}

MinimizerTrajectory minimizer(const SpectralModel& m, double T,
                              const std::vector<double>& z, std::size_t grid) {
  if (z.empty() || z.size() > m.n_modes())
    throw std::domain_error("minimizer: target length must be in [1, N]");
  if (grid < 1) throw std::domain_error("minimizer: need grid >= 1");
  if (!(T > 0.0)) throw std::domain_error("minimizer: need T > 0");

  MinimizerTrajectory traj;
  traj.horizon = T;
  traj.endpoint = z;
  traj.samples.resize(grid + 1);
  const double h = T / static_cast<double>(grid);
  for (std::size_t i = 0; i <= grid; ++i) {
    const double t = (i == grid) ? T : h * static_cast<double>(i);
    auto& s = traj.samples[i];
    s.t = t;
    s.y.resize(z.size());
    for (std::size_t k = 1; k <= z.size(); ++k)
      s.y[k - 1] = minimizer_value(m, k, t, z[k - 1], T);
  }
  traj.cost = total_rate(m, z, T);
  return traj;
}

double mode_cost(const SpectralModel& m, std::size_t k, double z_k, double T) {
  if (k < 1 || k > m.n_modes())
    throw std::domain_error("mode_cost: mode index out of range");
  if (!(T > 0.0)) throw std::domain_error("mode_cost: need T > 0");
  const double a = m.alphas[k - 1];
  const double l = m.lambdas[k - 1];
  const double denom = -std::expm1(-2.0 * a * T);
  return a * z_k * z_k / (l * l * denom);
}

double total_rate(const SpectralModel& m, const std::vector<double>& z,
                  double T) {
  if (z.empty() || z.size() > m.n_modes())
    throw std::domain_error("total_rate: target length must be in [1, N]");
  // phi_1 z_1^2 + sum_{k>=2} phi_k z_k^2, i.e. every mode pays its finite-T
  // cost and mode 1 additionally pays the stationary term alpha_1/lambda_1^2.
  double s = m.alphas[0] / (m.lambdas[0] * m.lambdas[0]) * z[0] * z[0];
  for (std::size_t k = 1; k <= z.size(); ++k)
    s += mode_cost(m, k, z[k - 1], T);
  return s;
}

MinimalExit minimal_exit(const SpectralModel& m, double L, double T) {
  m.validate();
  if (!(L > 0.0)) throw std::domain_error("minimal_exit: need L > 0");
  if (!(T > 0.0)) throw std::domain_error("minimal_exit: need T > 0");

  MinimalExit r;
  double best = phi(m, 1, T);
  r.direction = 1;
  r.tied_modes = {1};
  for (std::size_t k = 2; k <= m.n_modes(); ++k) {
    const double v = phi(m, k, T);
    if (v < best) {
      best = v;
      r.direction = k;
      r.tied_modes = {k};
    } else if (v == best) {
      r.tied_modes.push_back(k);
    }
  }
  r.value = L * L * best;
  r.degenerate = r.tied_modes.size() > 1;
  return r;
}

double euler_lagrange_residual(const MinimizerTrajectory& traj,
                               const SpectralModel& m) {
  const auto& s = traj.samples;
  if (s.size() < 5)
    throw std::domain_error("euler_lagrange_residual: need >= 5 samples");
  const double h = s[1].t - s[0].t;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (std::abs((s[i].t - s[i - 1].t) - h) > 1e-9 * std::max(1.0, h))
      throw std::domain_error("euler_lagrange_residual: nonuniform grid");
  }
  // The minimizer solves y'' = alpha^2 y mode by mode; report the worst
  // central-difference defect scaled back to the ODE residual.
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    for (std::size_t k = 0; k < s[i].y.size(); ++k) {
      const double second =
          (s[i + 1].y[k] - 2.0 * s[i].y[k] + s[i - 1].y[k]) / (h * h);
      const double a = m.alphas[k];
      worst = std::max(worst, std::abs(second - a * a * s[i].y[k]));
    }
  }
  return worst;
}

double quasipotential(const SpectralModel& m, const std::vector<double>& x) {
  if (x.size() > m.n_modes())
    throw std::domain_error("quasipotential: vector longer than the model");
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k)
    s += m.alphas[k] / (m.lambdas[k] * m.lambdas[k]) * x[k] * x[k];
  return s;
}

}  // namespace spex
