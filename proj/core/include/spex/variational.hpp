#pragma once
// Closed-form solution of the eps = 0 control problem: drive the deterministic
// system from 0 to a target z in time T at minimal energy. Per mode,
//
//   y*_k(t) = z_k (e^{-alpha_k (T-t)} - e^{-alpha_k (t+T)}) / (1 - e^{-2 alpha_k T})
//   cost_k  = alpha_k z_k^2 / (lambda_k^2 (1 - e^{-2 alpha_k T}))
//
// and the full rate is the quadratic form
//
//   I(z,T) = (alpha_1/lambda_1^2) z_1^2 + sum_k cost_k = phi_1 z_1^2 + sum_{k>=2} phi_k z_k^2.
//
// The quasipotential (T -> infinity envelope) is V(x) = sum_k (alpha_k/lambda_k^2) x_k^2.

#include <cstddef>
#include <vector>

#include "spex/model.hpp"

namespace spex {

struct MinimizerTrajectory {
  double horizon = 0.0;
  std::vector<double> endpoint;

  struct Sample {
    double t;
    std::vector<double> y;
  };
  std::vector<Sample> samples;  // uniform grid, samples.front().t = 0, back().t = T
  double cost = 0.0;            // value of the quadratic form I(z, T)
};

// Single-mode closed form y*_k(t); k is 1-based. Throws std::domain_error for
// T <= 0, t outside [0, T], or k out of range.
double minimizer_value(const SpectralModel& m, std::size_t k, double t,
                       double z_k, double T);

// Samples the minimizer on grid+1 uniform points (grid intervals). Throws
// std::domain_error for empty z or z longer than the model, grid < 1.
MinimizerTrajectory minimizer(const SpectralModel& m, double T,
                              const std::vector<double>& z, std::size_t grid);

// cost_k above; k is 1-based.
double mode_cost(const SpectralModel& m, std::size_t k, double z_k, double T);

// The quadratic form I(z, T).
double total_rate(const SpectralModel& m, const std::vector<double>& z, double T);

struct MinimalExit {
  std::size_t direction = 1;  // 1-based mode index of the cheapest exit
  double value = 0.0;         // L^2 * min_k (phi-weighted rate)
  bool degenerate = false;    // another mode ties the minimum
  std::vector<std::size_t> tied_modes;  // all minimizing modes, ascending
};

// argmin over |z|_2 = L of the quadratic form; by diagonality this is
// L^2 * min(phi_1(T), min_{k>=2} phi_k(T)), attained at z = +-L e_k. Ties go
// to the smallest index with the degenerate flag set (consumed by the
// multi-mode control projection).
MinimalExit minimal_exit(const SpectralModel& m, double L, double T);

// Verification oracle: max over interior grid points and modes of
// |second central difference of y_k - alpha_k^2 y_k h^2| / h^2, which must
// vanish at rate O(h^2) for the exact minimizer (it solves y'' = A^2 y).
// Throws std::domain_error for fewer than 5 samples or a nonuniform grid.
double euler_lagrange_residual(const MinimizerTrajectory& traj,
                               const SpectralModel& m);

// V(x) = sum_k (alpha_k/lambda_k^2) x_k^2 over the truncation. x may be
// shorter than the model; longer throws std::domain_error.
double quasipotential(const SpectralModel& m, const std::vector<double>& x);

}  // namespace spex
