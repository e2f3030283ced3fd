#pragma once
// Change-of-measure controls. All schemes build a value function U and apply
// the feedback u = -B* D_x U, which for the diagonal B means
// u_j = -lambda_j dU/dx_j; the sign convention makes the controlled drift
// push <X,e_1> toward the boundary.
//
//   F_1(x)     = (alpha_1/lambda_1^2) (L^2 - x_1^2)        (base subsolution)
//   scheme 1   = mollify {F_1, F_2, F_3} for t <= T - t*, plain F_1 afterwards,
//                with F_2/F_3 the regularized shifted value functions (M > 1)
//   scheme 2   = mollify {F_1, F_2^eps}, F_2^eps = (alpha_1/lambda_1^2)(L^2 - eps^kappa)
//   multimode  = scheme 2 with F_1 generalized to L^2 - sum_{k in P} x_k^2
//                for degenerate leading eigenvalues
//
// Mollification is the smooth minimum U^delta = -delta log sum_i e^{-F_i/delta}
// with simplex weights rho_i; the scheme-2 weight of F_1 is
// rho_1 = 1 / (1 + e^{(F_1 - F_2^eps)/delta}).
//
// g_epsilon_bound evaluates the three-term lower bound for the verification
// operator G^eps applied to the mollified pair,
//
//   (1-eta)/2 (1 - eps/delta) beta_0 + (1-eta) rho_1 gamma_1
//     + (eta - 2 eta^2)/2 rho_1^2 |B* D_x F_1|^2,
//
// with beta_0 = rho_1 (1-rho_1) |B* D_x F_1|^2 and gamma_1 = -eps alpha_1.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "spex/model.hpp"

namespace spex {

enum class SchemeVariant { none, scheme1, scheme2, multimode };

const char* to_string(SchemeVariant v);
SchemeVariant scheme_variant_from_string(const std::string& s);

struct SchemeConfig {
  SchemeVariant variant = SchemeVariant::scheme2;
  double kappa = 0.6;
  double eta = 0.25;
  // delta_rule "2eps" resolves delta = 2*eps at run time; "explicit" uses
  // delta_value as given.
  std::string delta_rule = "2eps";
  double delta_value = 0.0;
  // Scheme 1 regularizer and time cutoff; 0 means "derive from kappa":
  // M = eps^{-kappa}, t_star = (2 lambda_1^2 kappa / alpha_1) ln(1/eps).
  double m_regularizer = 0.0;
  double t_star = 0.0;
  // Scheme 1 target coordinate <z,e_1>; 0 means "use L".
  double z1 = 0.0;
  std::vector<std::size_t> projected_modes = {1};  // 1-based

  // Structural validation (ranges, nonempty projection, known delta rule).
  // Throws std::invalid_argument. eps-dependent conditions live in
  // resolve_scheme.
  void validate() const;
};

// Run-time resolved parameters for one (eps, L, T) cell.
struct ResolvedScheme {
  double delta = 0.0;
  double m_regularizer = 0.0;  // scheme 1 only
  double t_star = 0.0;         // scheme 1 only
  double z1 = 0.0;             // scheme 1 only
};

// Applies the delta rule and the natural scalings, and enforces the run-time
// preconditions: scheme 2 requires eps^{1-kappa} <= alpha_1/(2 lambda_1^2)
// (throws std::invalid_argument naming the bound), scheme 1 requires M > 1,
// t_star > 0 and z1^2 <= L^2 (the default target sits on the boundary, which
// the regularizer M keeps well posed).
ResolvedScheme resolve_scheme(const SpectralModel& m, const SchemeConfig& cfg,
                              double eps, double L, double T);

struct MollifierState {
  std::vector<double> f_values;
  std::vector<double> weights;  // rho_i, on the simplex
  double u_delta = 0.0;         // -delta log sum e^{-F_i/delta}
  std::vector<double> control_coeffs;  // filled by the scheme evaluators
};

// F_1 as a function of the projected coordinate(s): single coordinate form.
double f1(const SpectralModel& m, double L, double x1);

// Scheme 1 value functions at (t, x1) for horizon T and target z1:
//   F_{2,3} = (alpha_1 / (lambda_1^2 (1/M + 1 - e^{2 alpha_1 (t-T)})))
//             * (z1^2 + e^{2 alpha_1 (t-T)} x1^2 -+ 2 e^{alpha_1 (t-T)} z1 x1)
//             + (alpha_1/lambda_1^2)(L^2 - z1^2)
// Throws std::domain_error for M <= 0 or t > T.
std::array<double, 2> scheme1_f23(const SpectralModel& m, double L, double M,
                                  double z1, double t, double T, double x1);

// Smooth minimum via log-sum-exp with min-F subtraction. Throws
// std::domain_error for empty input or delta <= 0. control_coeffs left empty.
MollifierState mollify(const std::vector<double>& f_values, double delta);

// Scheme 2 feedback coefficient u_1 = rho_1(x1) (2 alpha_1/lambda_1) x1.
// Enforces the scheme 2 validity bound. All other modes carry u = 0.
double scheme2_control(const SpectralModel& m, double L, double kappa,
                       double delta, double eps, double x1);

// Scheme 1 feedback coefficient: pure F_1 branch (2 alpha_1/lambda_1) x1 for
// t > T - t*, otherwise the rho-weighted sum of the analytic F_1/F_2/F_3
// gradients.
double scheme1_control(const SpectralModel& m, double L,
                       const SchemeConfig& cfg, double eps, double t, double T,
                       double x1);

// Full mollifier diagnostics at one point (f_values, weights, u_delta,
// control_coeffs), for explain output and gradient tests.
MollifierState scheme2_state(const SpectralModel& m, double L, double kappa,
                             double delta, double eps, double x1);
MollifierState scheme1_state(const SpectralModel& m, double L,
                             const SchemeConfig& cfg, double eps, double t,
                             double T, double x1);

// Precomputed per-cell control evaluator used by the dynamics hot loop.
// fill(t, x, u) writes the coefficients for the projected modes (parallel to
// cfg.projected_modes) and leaves every other mode's control at zero.
// Variant `none` controls no modes at all (n_controlled() == 0).
class SchemeControl {
 public:
  SchemeControl(const SpectralModel& m, const SchemeConfig& cfg, double eps,
                double L, double T);

  std::size_t n_controlled() const { return modes0_.size(); }
  const std::vector<std::size_t>& controlled_modes0() const { return modes0_; }

  void fill(double t, const double* x, double* u) const;

 private:
  SchemeVariant variant_;
  std::vector<std::size_t> modes0_;  // 0-based projected mode indices
  double n_over_lambda1_sq_ = 0.0;   // alpha_1 / lambda_1^2
  double eps_kappa_ = 0.0;
  double delta_ = 0.0;
  double l_sq_ = 0.0;
  std::vector<double> gain_;  // per projected mode: 2 alpha_1 lambda_k / lambda_1^2
  // scheme 1 pieces
  double alpha1_ = 0.0;
  double lambda1_ = 0.0;
  double m_reg_ = 0.0;
  double t_star_ = 0.0;
  double z1_ = 0.0;
  double horizon_ = 0.0;
};

// Appendix-style three-term lower bound at the projected coordinate x1.
double g_epsilon_bound(const SpectralModel& m, double L,
                       const SchemeConfig& cfg, double eps, double x1);

// Region verification. V_1 = x1^2 splits [0, L^2] at eps^{kappa+a} and
// 2 eps^kappa - eps*Kc with Kc = -ln 3; a is the region exponent, chosen in
// (0, 1-kappa) ((1-kappa)/2 when passed as 0). Each region gets `samples`
// stratified V_1 draws (region endpoints always included).
//
// min_raw is the minimum of the full three-term bound. min_provable drops, in
// the innermost region only, the -(1-eta) rho_1 eps alpha_1 term: that term
// is exponentially negligible as eps -> 0 but genuinely negative at finite
// eps, while the remaining terms are nonnegative by construction. Both minima
// are reported; `pass` gates on min_provable >= -slack with
// slack = eps e^{-1/eps}.
struct RegionCheck {
  double v_lo = 0.0;
  double v_hi = 0.0;
  double min_raw = 0.0;
  double min_provable = 0.0;
  double argmin_v = 0.0;  // V_1 attaining min_provable
  std::size_t samples = 0;
  bool pass = false;
};

struct RegionReport {
  double eps = 0.0;
  double slack = 0.0;
  double region_exponent = 0.0;
  std::array<RegionCheck, 3> regions;
  bool pass = false;
};

RegionReport verify_regions(const SpectralModel& m, double L,
                            const SchemeConfig& cfg, double eps,
                            std::size_t samples, std::uint64_t seed,
                            double region_exponent = 0.0);

}  // namespace spex
