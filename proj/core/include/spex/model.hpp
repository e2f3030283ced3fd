#pragma once
// Diagonal linear model dX = A X dt + sqrt(eps) B dw on the eigenbasis {e_k},
// with A e_k = -alpha_k e_k and B e_k = lambda_k e_k, plus the spectral-gap
// quantities that decide whether the cheapest exit from the L2-ball
// concentrates on the e_1 axis:
//
//   phi_1(T) = alpha_1 / (lambda_1^2 (1 - e^{-2 alpha_1 T})) + alpha_1/lambda_1^2
//   phi_k(T) = alpha_k / (lambda_k^2 (1 - e^{-2 alpha_k T}))          (k >= 2)
//   psi_k(T) = phi_1(T) - phi_k(T)
//
// psi_k < 0 means mode 1 beats mode k at horizon T. T_k is the last horizon
// at which mode k still competes (psi_k >= 0); T_0 = max_k T_k.
//
// Gap conditions (checked over k >= 2):
//   condition A: lambda_1 >= lambda_k and 3 alpha_1 < alpha_k   (implies B, T_0 = 0)
//   condition B: 2 alpha_1 / lambda_1^2 < alpha_k / lambda_k^2  (strict)

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace spex {

// Asymptotic growth of the eigenvalue sequences beyond the explicit
// truncation: alpha_k ~ c k^p, lambda_k ~ d k^{-q}. Used for analytic tail
// checks and truncation-error bounds.
struct TailGrowth {
  double c = 1.0;
  double p = 2.0;
  double d = 1.0;
  double q = 0.0;
};

struct SpectralModel {
  std::vector<double> alphas;
  std::vector<double> lambdas;
  std::optional<TailGrowth> tail;

  std::size_t n_modes() const { return alphas.size(); }

  // Truncated noise-trace sum: sum_{k<=N} lambda_k^2 / alpha_k.
  double noise_trace() const;

  // Throws std::invalid_argument unless alphas are positive nondecreasing,
  // lambdas are positive, and the two sequences have equal nonzero length.
  void validate() const;
};

// Named eigenvalue families: "integer-squares" (alpha_k = k^2, lambda_k = 1)
// and "dirichlet-laplacian-1d" (alpha_k = pi^2 k^2, lambda_k = 1, eigenbasis
// e_k(xi) = sqrt(2) sin(k pi xi)). Throws std::invalid_argument for unknown
// names or n == 0.
SpectralModel preset_model(const std::string& name, std::size_t n);

// Gap functions; k is 1-based. phi throws std::domain_error for T <= 0 or k
// out of range; psi additionally rejects k = 1.
double phi(const SpectralModel& m, std::size_t k, double T);
double psi(const SpectralModel& m, std::size_t k, double T);

struct GapReport {
  bool assumption_A_holds = false;
  bool assumption_B_holds = false;
  // t_k[k-1] is T_k for competing modes k >= 2 (entry 0 unused, kept 0).
  // Modes violating strict condition B get +infinity (psi_k >= 0 for
  // arbitrarily large T, so no finite crossing exists).
  std::vector<double> t_k;
  double t0 = 0.0;
  // min over k >= 2 of alpha_k/lambda_k^2 - 2 alpha_1/lambda_1^2; positive
  // exactly when condition B holds strictly. 0 for single-mode models.
  double gap_margin = 0.0;
};

// Boolean flags and gap_margin only; t_k left empty and t0 = 0.
GapReport check_assumptions(const SpectralModel& m);

// Full report including crossing times. Never throws on condition-B
// violations: the offending t_k entries are +infinity and t0 follows.
GapReport analyze_gaps(const SpectralModel& m, double tol = 1e-12);

// T_k = sup{T > 0 : psi_k(T) >= 0} for a competing mode k >= 2, located by
// bracket doubling plus bisection to tolerance tol; 0 when psi_k < 0
// everywhere. Throws std::domain_error when mode k violates strict condition
// B ("no finite crossing guaranteed") or k is out of range.
double crossing_time(const SpectralModel& m, std::size_t k, double tol = 1e-12);

// max of crossing_time over k = 2..N; 0 for single-mode models.
double t0(const SpectralModel& m, double tol = 1e-12);

// Analytic checks on a symbolic tail: the noise-trace sum converges iff
// 2q + p > 1, and the tail crossing times vanish (T_k = 0 eventually) iff the
// tail amplitudes fall at or below lambda_1 while alpha_k grows.
struct TailCheck {
  bool noise_trace_converges = false;
  bool crossing_times_vanish = false;
};
TailCheck check_tail(const SpectralModel& m);

}  // namespace spex
