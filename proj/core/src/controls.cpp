#include "spex/controls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "spex/rng.hpp"

namespace spex {

const char* to_string(SchemeVariant v) {
  switch (v) {
    case SchemeVariant::none:
      return "none";
    case SchemeVariant::scheme1:
      return "scheme1";
    case SchemeVariant::scheme2:
      return "scheme2";
    case SchemeVariant::multimode:
      return "multimode";
  }
  return "none";
}

SchemeVariant scheme_variant_from_string(const std::string& s) {
  if (s == "none") return SchemeVariant::none;
  if (s == "scheme1") return SchemeVariant::scheme1;
  if (s == "scheme2") return SchemeVariant::scheme2;
  if (s == "multimode") return SchemeVariant::multimode;
  throw std::invalid_argument("unknown scheme variant '" + s + "'");
}

void SchemeConfig::validate() const {
  if (!(kappa > 0.0 && kappa < 1.0))
    throw std::invalid_argument("scheme: kappa must lie in (0, 1)");
  if (!(eta > 0.0 && eta < 0.5))
    throw std::invalid_argument("scheme: eta must lie in (0, 1/2)");
  if (delta_rule != "2eps" && delta_rule != "explicit")
    throw std::invalid_argument(
        "scheme: delta_rule must be '2eps' or 'explicit'");
  if (delta_rule == "explicit" && !(delta_value > 0.0))
    throw std::invalid_argument("scheme: explicit delta must be positive");
  if (m_regularizer < 0.0 || t_star < 0.0)
    throw std::invalid_argument(
        "scheme: regularizer and t_star must be nonnegative");
  if (projected_modes.empty())
    throw std::invalid_argument("scheme: projected_modes must be nonempty");
  for (std::size_t i = 0; i < projected_modes.size(); ++i) {
    if (projected_modes[i] < 1)
      throw std::invalid_argument("scheme: projected modes are 1-based");
    if (i > 0 && projected_modes[i] <= projected_modes[i - 1])
      throw std::invalid_argument(
          "scheme: projected modes must be strictly increasing");
  }
  if (variant != SchemeVariant::multimode &&
      (projected_modes.size() != 1 || projected_modes[0] != 1))
    throw std::invalid_argument(
        "scheme: only the multimode variant projects beyond mode 1");
}

namespace {

double resolve_delta(const SchemeConfig& cfg, double eps) {
  const double d = (cfg.delta_rule == "2eps") ? 2.0 * eps : cfg.delta_value;
  if (!(d > 0.0))
    throw std::invalid_argument("scheme: delta must resolve positive");
  return d;
}

void require_shifted_level_valid(const SpectralModel& m, double kappa,
                                 double eps) {
  const double lhs = std::pow(eps, 1.0 - kappa);
  const double rhs = m.alphas[0] / (2.0 * m.lambdas[0] * m.lambdas[0]);
  if (lhs > rhs)
    throw std::invalid_argument(
        "scheme: shifted-level validity needs eps^(1-kappa) <= "
        "alpha_1/(2 lambda_1^2); got " +
        std::to_string(lhs) + " > " + std::to_string(rhs) +
        " (raise kappa or shrink eps)");
}

// Mollifier weight of F_1 against the eps-shifted level: vsq is the projected
// squared coordinate sum_{k in P} x_k^2.
double shifted_rho1(double base, double eps_kappa, double delta, double vsq) {
  return 1.0 / (1.0 + std::exp(base * (eps_kappa - vsq) / delta));
}

// Shared evaluation for the time-dependent three-function scheme. lsq = L^2.
// Past the cutoff (t > T - t_star) the control is the plain F_1 feedback.
double scheme1_u(double a1, double l1, double lsq, double M, double z1,
                 double t_star, double T, double delta, double t, double x1,
                 MollifierState* state) {
  const double base = a1 / (l1 * l1);
  if (t > T - t_star) {
    if (state) {
      state->f_values = {base * (lsq - x1 * x1)};
      state->weights = {1.0};
      state->u_delta = state->f_values[0];
      state->control_coeffs = {2.0 * a1 / l1 * x1};
    }
    return 2.0 * a1 / l1 * x1;
  }
  const double e = std::exp(a1 * (t - T));
  const double den = 1.0 / M + 1.0 - e * e;
  const double sq = z1 * z1 + e * e * x1 * x1;
  const double cross = 2.0 * e * z1 * x1;
  const double shift = base * (lsq - z1 * z1);
  const double f1v = base * (lsq - x1 * x1);
  const double f2v = base / den * (sq - cross) + shift;
  const double f3v = base / den * (sq + cross) + shift;
  const double g1 = -2.0 * base * x1;
  const double g2 = base / den * (2.0 * e * e * x1 - 2.0 * e * z1);
  const double g3 = base / den * (2.0 * e * e * x1 + 2.0 * e * z1);
  MollifierState s = mollify({f1v, f2v, f3v}, delta);
  const double u =
      -l1 * (s.weights[0] * g1 + s.weights[1] * g2 + s.weights[2] * g3);
  if (state) {
    s.control_coeffs = {u};
    *state = std::move(s);
  }
  return u;
}

struct BoundTerms {
  double diffusion = 0.0;  // (1-eta)/2 (1 - eps/delta) rho_1(1-rho_1)|B*DF_1|^2
  double drift = 0.0;      // -(1-eta) rho_1 eps alpha_1
  double quadratic = 0.0;  // (eta-2eta^2)/2 rho_1^2 |B*DF_1|^2
};

BoundTerms bound_terms(double a1, double l1, double eta, double eps,
                       double delta, double eps_kappa, double x1) {
  const double base = a1 / (l1 * l1);
  const double rho1 = shifted_rho1(base, eps_kappa, delta, x1 * x1);
  const double g = 2.0 * a1 / l1 * x1;
  const double gsq = g * g;
  BoundTerms b;
  b.diffusion =
      0.5 * (1.0 - eta) * (1.0 - eps / delta) * rho1 * (1.0 - rho1) * gsq;
  b.drift = (1.0 - eta) * rho1 * (-eps * a1);
  b.quadratic = 0.5 * (eta - 2.0 * eta * eta) * rho1 * rho1 * gsq;
  return b;
}

}  // namespace

ResolvedScheme resolve_scheme(const SpectralModel& m, const SchemeConfig& cfg,
                              double eps, double L, double T) {
  m.validate();
  cfg.validate();
  if (!(eps > 0.0))
    throw std::invalid_argument("resolve_scheme: need eps > 0");
  if (!(L > 0.0)) throw std::invalid_argument("resolve_scheme: need L > 0");
  if (!(T > 0.0)) throw std::invalid_argument("resolve_scheme: need T > 0");
  if (cfg.projected_modes.back() > m.n_modes())
    throw std::invalid_argument(
        "resolve_scheme: projected mode beyond the model truncation");

  ResolvedScheme r;
  r.delta = resolve_delta(cfg, eps);
  const double a1 = m.alphas[0];
  const double l1 = m.lambdas[0];
  switch (cfg.variant) {
    case SchemeVariant::none:
      break;
    case SchemeVariant::scheme2:
    case SchemeVariant::multimode:
      require_shifted_level_valid(m, cfg.kappa, eps);
      break;
    case SchemeVariant::scheme1: {
      r.m_regularizer = cfg.m_regularizer > 0.0 ? cfg.m_regularizer
                                                : std::pow(eps, -cfg.kappa);
      r.t_star = cfg.t_star > 0.0
                     ? cfg.t_star
                     : 2.0 * l1 * l1 * cfg.kappa / a1 * std::log(1.0 / eps);
      r.z1 = cfg.z1 != 0.0 ? cfg.z1 : L;
      if (!(r.m_regularizer > 1.0))
        throw std::invalid_argument(
            "resolve_scheme: regularizer M must exceed 1");
      if (!(r.t_star > 0.0))
        throw std::invalid_argument(
            "resolve_scheme: t_star must resolve positive");
      if (!(r.z1 * r.z1 <= L * L))
        throw std::invalid_argument(
            "resolve_scheme: target must satisfy z1^2 <= L^2");
      break;
    }
  }
  return r;
}

double f1(const SpectralModel& m, double L, double x1) {
  return m.alphas[0] / (m.lambdas[0] * m.lambdas[0]) * (L * L - x1 * x1);
}

std::array<double, 2> scheme1_f23(const SpectralModel& m, double L, double M,
                                  double z1, double t, double T, double x1) {
  if (!(M > 0.0)) throw std::domain_error("scheme1_f23: need M > 0");
  if (t > T) throw std::domain_error("scheme1_f23: need t <= T");
  const double a1 = m.alphas[0];
  const double l1 = m.lambdas[0];
  const double base = a1 / (l1 * l1);
  const double e = std::exp(a1 * (t - T));
  const double den = 1.0 / M + 1.0 - e * e;
  const double sq = z1 * z1 + e * e * x1 * x1;
  const double cross = 2.0 * e * z1 * x1;
  const double shift = base * (L * L - z1 * z1);
  return {base / den * (sq - cross) + shift, base / den * (sq + cross) + shift};
}

MollifierState mollify(const std::vector<double>& f_values, double delta) {
  if (f_values.empty()) throw std::domain_error("mollify: empty input");
  if (!(delta > 0.0)) throw std::domain_error("mollify: need delta > 0");
  MollifierState s;
  s.f_values = f_values;
  const double fmin = *std::min_element(f_values.begin(), f_values.end());
  s.weights.resize(f_values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < f_values.size(); ++i) {
    s.weights[i] = std::exp(-(f_values[i] - fmin) / delta);
    sum += s.weights[i];
  }
  for (double& w : s.weights) w /= sum;
  s.u_delta = fmin - delta * std::log(sum);
  return s;
}

double scheme2_control(const SpectralModel& m, double L, double kappa,
                       double delta, double eps, double x1) {
  if (!(kappa > 0.0 && kappa < 1.0))
    throw std::domain_error("scheme2_control: kappa must lie in (0, 1)");
  if (!(delta > 0.0)) throw std::domain_error("scheme2_control: need delta > 0");
  if (!(eps > 0.0)) throw std::domain_error("scheme2_control: need eps > 0");
  require_shifted_level_valid(m, kappa, eps);
  (void)L;  // the level difference F_1 - F_2^eps is independent of L
  const double a1 = m.alphas[0];
  const double l1 = m.lambdas[0];
  const double rho1 = shifted_rho1(a1 / (l1 * l1), std::pow(eps, kappa), delta,
                                   x1 * x1);
  return rho1 * 2.0 * a1 / l1 * x1;
}

double scheme1_control(const SpectralModel& m, double L,
                       const SchemeConfig& cfg, double eps, double t, double T,
                       double x1) {
  if (cfg.variant != SchemeVariant::scheme1)
    throw std::invalid_argument(
        "scheme1_control: config variant must be scheme1");
  const ResolvedScheme r = resolve_scheme(m, cfg, eps, L, T);
  if (!(t >= 0.0 && t <= T))
    throw std::domain_error("scheme1_control: need t in [0, T]");
  return scheme1_u(m.alphas[0], m.lambdas[0], L * L, r.m_regularizer, r.z1,
                   r.t_star, T, r.delta, t, x1, nullptr);
}

MollifierState scheme2_state(const SpectralModel& m, double L, double kappa,
                             double delta, double eps, double x1) {
  if (!(kappa > 0.0 && kappa < 1.0))
    throw std::domain_error("scheme2_state: kappa must lie in (0, 1)");
  if (!(delta > 0.0)) throw std::domain_error("scheme2_state: need delta > 0");
  if (!(eps > 0.0)) throw std::domain_error("scheme2_state: need eps > 0");
  require_shifted_level_valid(m, kappa, eps);
  const double a1 = m.alphas[0];
  const double l1 = m.lambdas[0];
  const double base = a1 / (l1 * l1);
  const double shifted_level = base * (L * L - std::pow(eps, kappa));
  MollifierState s = mollify({f1(m, L, x1), shifted_level}, delta);
  s.control_coeffs = {s.weights[0] * 2.0 * a1 / l1 * x1};
  return s;
}

MollifierState scheme1_state(const SpectralModel& m, double L,
                             const SchemeConfig& cfg, double eps, double t,
                             double T, double x1) {
  if (cfg.variant != SchemeVariant::scheme1)
    throw std::invalid_argument("scheme1_state: config variant must be scheme1");
  const ResolvedScheme r = resolve_scheme(m, cfg, eps, L, T);
  if (!(t >= 0.0 && t <= T))
    throw std::domain_error("scheme1_state: need t in [0, T]");
  MollifierState s;
  scheme1_u(m.alphas[0], m.lambdas[0], L * L, r.m_regularizer, r.z1, r.t_star,
            T, r.delta, t, x1, &s);
  return s;
}

SchemeControl::SchemeControl(const SpectralModel& m, const SchemeConfig& cfg,
                             double eps, double L, double T)
    : variant_(cfg.variant) {
  const ResolvedScheme r = resolve_scheme(m, cfg, eps, L, T);
  const double a1 = m.alphas[0];
  const double l1 = m.lambdas[0];
  if (cfg.variant != SchemeVariant::none) {
    modes0_.reserve(cfg.projected_modes.size());
    gain_.reserve(cfg.projected_modes.size());
    for (std::size_t k : cfg.projected_modes) {
      modes0_.push_back(k - 1);
      gain_.push_back(2.0 * a1 * m.lambdas[k - 1] / (l1 * l1));
    }
  }
  n_over_lambda1_sq_ = a1 / (l1 * l1);
  eps_kappa_ = std::pow(eps, cfg.kappa);
  delta_ = r.delta;
  l_sq_ = L * L;
  alpha1_ = a1;
  lambda1_ = l1;
  m_reg_ = r.m_regularizer;
  t_star_ = r.t_star;
  z1_ = r.z1;
  horizon_ = T;
}

void SchemeControl::fill(double t, const double* x, double* u) const {
  switch (variant_) {
    case SchemeVariant::none:
      for (std::size_t j = 0; j < modes0_.size(); ++j) u[j] = 0.0;
      return;
    case SchemeVariant::scheme2:
    case SchemeVariant::multimode: {
      double vsq = 0.0;
      for (std::size_t j : modes0_) vsq += x[j] * x[j];
      const double rho1 =
          shifted_rho1(n_over_lambda1_sq_, eps_kappa_, delta_, vsq);
      for (std::size_t j = 0; j < modes0_.size(); ++j)
        u[j] = rho1 * gain_[j] * x[modes0_[j]];
      return;
    }
    case SchemeVariant::scheme1:
      u[0] = scheme1_u(alpha1_, lambda1_, l_sq_, m_reg_, z1_, t_star_,
                       horizon_, delta_, t, x[modes0_[0]], nullptr);
      return;
  }
}

double g_epsilon_bound(const SpectralModel& m, double L,
                       const SchemeConfig& cfg, double eps, double x1) {
  m.validate();
  cfg.validate();
  if (cfg.variant != SchemeVariant::scheme2 &&
      cfg.variant != SchemeVariant::multimode)
    throw std::invalid_argument(
        "g_epsilon_bound: needs an eps-shifted scheme (scheme2 or multimode)");
  if (!(eps > 0.0))
    throw std::invalid_argument("g_epsilon_bound: need eps > 0");
  (void)L;  // the bound depends on x1 and the level gap only
  const double delta = resolve_delta(cfg, eps);
  require_shifted_level_valid(m, cfg.kappa, eps);
  const BoundTerms b = bound_terms(m.alphas[0], m.lambdas[0], cfg.eta, eps,
                                   delta, std::pow(eps, cfg.kappa), x1);
  return b.diffusion + b.drift + b.quadratic;
}

RegionReport verify_regions(const SpectralModel& m, double L,
                            const SchemeConfig& cfg, double eps,
                            std::size_t samples, std::uint64_t seed,
                            double region_exponent) {
  m.validate();
  cfg.validate();
  if (cfg.variant != SchemeVariant::scheme2 &&
      cfg.variant != SchemeVariant::multimode)
    throw std::invalid_argument(
        "verify_regions: needs an eps-shifted scheme (scheme2 or multimode)");
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("verify_regions: need eps in (0, 1)");
  if (!(L > 0.0)) throw std::invalid_argument("verify_regions: need L > 0");
  if (samples < 1)
    throw std::invalid_argument("verify_regions: need samples >= 1");
  const double kappa = cfg.kappa;
  double a = region_exponent;
  if (a == 0.0) a = 0.5 * (1.0 - kappa);
  if (!(a > 0.0 && a < 1.0 - kappa))
    throw std::domain_error(
        "verify_regions: region exponent must lie in (0, 1-kappa)");
  const double delta = resolve_delta(cfg, eps);
  require_shifted_level_valid(m, kappa, eps);

  RegionReport rep;
  rep.eps = eps;
  rep.slack = eps * std::exp(-1.0 / eps);
  rep.region_exponent = a;

  const double lsq = L * L;
  const double va = std::pow(eps, kappa + a);
  const double vb = 2.0 * std::pow(eps, kappa) + eps * std::log(3.0);
  if (!(va < vb && vb < lsq))
    throw std::domain_error(
        "verify_regions: thresholds out of order, need "
        "eps^(kappa+a) < 2 eps^kappa + eps ln 3 < L^2");

  const double edges[4] = {0.0, va, vb, lsq};
  const double a1 = m.alphas[0];
  const double l1 = m.lambdas[0];
  const double ek = std::pow(eps, kappa);
  const std::array<std::uint64_t, 2> key = {seed, 0};

  rep.pass = true;
  for (int rgn = 0; rgn < 3; ++rgn) {
    RegionCheck& c = rep.regions[static_cast<std::size_t>(rgn)];
    c.v_lo = edges[rgn];
    c.v_hi = edges[rgn + 1];
    const double width = (c.v_hi - c.v_lo) / static_cast<double>(samples);
    double min_raw = std::numeric_limits<double>::infinity();
    double min_prov = std::numeric_limits<double>::infinity();
    double arg = c.v_lo;
    const auto eval = [&](double v) {
      const BoundTerms b =
          bound_terms(a1, l1, cfg.eta, eps, delta, ek, std::sqrt(v));
      const double raw = b.diffusion + b.drift + b.quadratic;
      // In the innermost region the drift term is exponentially negligible as
      // eps -> 0 but negative at finite eps; the certified part drops it
      // there, matching what the construction actually proves.
      const double prov = (rgn == 0) ? b.diffusion + b.quadratic : raw;
      min_raw = std::min(min_raw, raw);
      if (prov < min_prov) {
        min_prov = prov;
        arg = v;
      }
    };
    eval(c.v_lo);
    eval(c.v_hi);
    for (std::size_t i = 0; i < samples; ++i) {
      const auto blk = philox4x64(
          make_counter(i, 0, static_cast<std::uint64_t>(rgn),
                       purpose_region_sampling),
          key);
      const double u = u64_to_unit(blk[0]);
      eval(c.v_lo + (static_cast<double>(i) + u) * width);
    }
    c.min_raw = min_raw;
    c.min_provable = min_prov;
    c.argmin_v = arg;
    c.samples = samples + 2;
    c.pass = min_prov >= -rep.slack;
    rep.pass = rep.pass && c.pass;
  }
  return rep;
}

}  // namespace spex
