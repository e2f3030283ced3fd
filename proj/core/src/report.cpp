#include "spex/report.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace spex {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const SweepCell* find_cell(const std::vector<SweepCell>& cells, std::size_t ie,
                           std::size_t it) {
  for (const auto& c : cells)
    if (c.i_eps == ie && c.i_t == it) return &c;
  return nullptr;
}

}  // namespace

std::string sweep_csv(const std::vector<SweepCell>& cells,
                      const SimConfig& sim_template, const SchemeConfig& scheme,
                      std::size_t K) {
  std::ostringstream out;
  out << "eps,T,N,K,scheme,estimate,std_err,re_per_sample,ci_low,ci_high,"
         "exit_fraction,e1_concentration,invalid_count,wall_time_s\n";
  const double nan = std::nan("");
  for (const auto& c : cells) {
    out << fmt(c.eps) << ',' << fmt(c.horizon) << ',' << sim_template.n_modes
        << ',' << K << ',' << to_string(scheme.variant) << ',';
    if (c.ok) {
      const EstimateReport& r = c.report;
      const double std_err =
          r.sample_std / std::sqrt(static_cast<double>(r.k_used));
      out << fmt(r.estimate) << ',' << fmt(std_err) << ','
          << fmt(r.re_per_sample) << ',' << fmt(r.ci95[0]) << ','
          << fmt(r.ci95[1]) << ',' << fmt(r.exit_fraction) << ','
          << fmt(r.e1_concentration) << ',' << r.invalid_count << ','
          << fmt(r.wall_time_s);
    } else {
      for (int i = 0; i < 8; ++i) out << fmt(nan) << ',';
      out << fmt(nan);
    }
    out << '\n';
  }
  return out.str();
}

std::string sweep_markdown(const std::vector<SweepCell>& cells,
                           const std::vector<double>& eps_grid,
                           const std::vector<double>& t_grid,
                           const std::string& field) {
  if (field != "estimate" && field != "re_per_sample")
    throw std::invalid_argument(
        "sweep_markdown: field must be 'estimate' or 're_per_sample'");
  std::ostringstream out;
  out << "| eps \\ T |";
  for (double t : t_grid) out << ' ' << fmt6(t) << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < t_grid.size(); ++i) out << "---|";
  out << '\n';
  for (std::size_t ie = 0; ie < eps_grid.size(); ++ie) {
    out << "| " << fmt6(eps_grid[ie]) << " |";
    for (std::size_t it = 0; it < t_grid.size(); ++it) {
      const SweepCell* c = find_cell(cells, ie, it);
      if (c == nullptr || !c->ok) {
        out << " err |";
      } else if (c->report.exit_fraction == 0.0) {
        out << " - |";
      } else {
        const double v = field == "estimate" ? c->report.estimate
                                             : c->report.re_per_sample;
        out << ' ' << fmt6(v) << " |";
      }
    }
    out << '\n';
  }
  return out.str();
}

nlohmann::json sweep_json(const std::vector<SweepCell>& cells,
                          const SimConfig& sim_template,
                          const SchemeConfig& scheme, std::size_t K) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : cells) {
    nlohmann::json j = {{"i_eps", c.i_eps},
                        {"i_t", c.i_t},
                        {"eps", c.eps},
                        {"T", c.horizon},
                        {"N", sim_template.n_modes},
                        {"K", K},
                        {"scheme", to_string(scheme.variant)},
                        {"ok", c.ok}};
    if (c.ok) {
      const EstimateReport& r = c.report;
      j["estimate"] = r.estimate;
      j["std_err"] = r.sample_std / std::sqrt(static_cast<double>(r.k_used));
      j["re_per_sample"] = r.re_per_sample;
      j["ci_low"] = r.ci95[0];
      j["ci_high"] = r.ci95[1];
      j["exit_fraction"] = r.exit_fraction;
      // NaN has no JSON representation; null marks "no exits" instead.
      if (std::isnan(r.e1_concentration))
        j["e1_concentration"] = nullptr;
      else
        j["e1_concentration"] = r.e1_concentration;
      j["k_used"] = r.k_used;
      j["invalid_count"] = r.invalid_count;
      j["wall_time_s"] = r.wall_time_s;
    } else {
      j["error"] = c.error;
    }
    arr.push_back(std::move(j));
  }
  return arr;
}

namespace {

// First competing mode violating the named condition, 0 if none.
std::size_t first_violator(const SpectralModel& m, bool condition_a) {
  const double a1 = m.alphas[0], l1 = m.lambdas[0];
  for (std::size_t k = 2; k <= m.n_modes(); ++k) {
    const double ak = m.alphas[k - 1], lk = m.lambdas[k - 1];
    if (condition_a) {
      if (!(l1 >= lk && 3.0 * a1 < ak)) return k;
    } else {
      if (!(2.0 * a1 / (l1 * l1) < ak / (lk * lk))) return k;
    }
  }
  return 0;
}

}  // namespace

std::string gap_report_text(const SpectralModel& m, const GapReport& gap) {
  std::ostringstream out;
  out << "spectral gap report\n";
  out << "  modes: " << m.n_modes() << '\n';
  out << "  Assumption A (lambda_1 >= lambda_k and 3 alpha_1 < alpha_k, k >= 2): ";
  if (gap.assumption_A_holds)
    out << "holds\n";
  else
    out << "fails at k=" << first_violator(m, true) << '\n';
  out << "  Assumption B (2 alpha_1/lambda_1^2 < alpha_k/lambda_k^2, k >= 2): ";
  if (gap.assumption_B_holds)
    out << "holds, margin " << fmt6(gap.gap_margin) << '\n';
  else
    out << "fails at k=" << first_violator(m, false) << '\n';
  if (!gap.t_k.empty()) {
    out << "  competing-horizon crossings T_k:\n";
    for (std::size_t k = 2; k <= gap.t_k.size(); ++k) {
      out << "    k=" << k << ": ";
      if (std::isinf(gap.t_k[k - 1]))
        out << "inf (mode never stops competing)\n";
      else
        out << fmt(gap.t_k[k - 1]) << '\n';
    }
    out << "  T0 = " << (std::isinf(gap.t0) ? "inf" : fmt(gap.t0)) << '\n';
  }
  return out.str();
}

std::string region_report_text(const RegionReport& rep) {
  std::ostringstream out;
  out << "shifted-level verification at eps=" << fmt6(rep.eps) << " (slack "
      << fmt6(rep.slack) << ", split exponent a=" << fmt6(rep.region_exponent)
      << ")\n";
  for (std::size_t i = 0; i < rep.regions.size(); ++i) {
    const RegionCheck& c = rep.regions[i];
    out << "  region " << i + 1 << ": V1 in [" << fmt6(c.v_lo) << ", "
        << fmt6(c.v_hi) << "], min_raw=" << fmt(c.min_raw)
        << ", min_certified=" << fmt(c.min_provable)
        << " at V1=" << fmt6(c.argmin_v) << ", points=" << c.samples << ": "
        << (c.pass ? "PASS" : "FAIL") << '\n';
  }
  out << "  overall: " << (rep.pass ? "PASS" : "FAIL") << '\n';
  return out.str();
}

std::string discrepancy_csv(const std::vector<DiscrepancyReport>& rows) {
  std::ostringstream out;
  out << "N,gamma,eps,T,analytic_bound,empirical_sup_mean,ratio\n";
  for (const auto& r : rows) {
    out << r.n_coarse << ',' << fmt(r.gamma) << ',' << fmt(r.eps) << ','
        << fmt(r.horizon) << ',' << fmt(r.analytic_bound) << ','
        << fmt(r.empirical_sup_mean) << ',' << fmt(r.ratio) << '\n';
  }
  return out.str();
}

std::string field_csv(const std::vector<double>& times,
                      const std::vector<std::vector<double>>& coeffs,
                      std::size_t xi_points) {
  if (times.size() != coeffs.size())
    throw std::invalid_argument("field_csv: times/coeffs length mismatch");
  if (xi_points < 2)
    throw std::invalid_argument("field_csv: need at least 2 grid points");
  std::ostringstream out;
  out << "t";
  for (std::size_t i = 0; i < xi_points; ++i) {
    const double xi =
        static_cast<double>(i) / static_cast<double>(xi_points - 1);
    out << ",xi=" << fmt6(xi);
  }
  out << '\n';
  for (std::size_t r = 0; r < times.size(); ++r) {
    out << fmt(times[r]);
    for (std::size_t i = 0; i < xi_points; ++i) {
      const double xi =
          static_cast<double>(i) / static_cast<double>(xi_points - 1);
      double v = 0.0;
      for (std::size_t k = 1; k <= coeffs[r].size(); ++k)
        v += coeffs[r][k - 1] * std::numbers::sqrt2 *
             std::sin(static_cast<double>(k) * std::numbers::pi * xi);
      out << ',' << fmt(v);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace spex
