// Command-line front end: analyze (spectral-gap and minimal-exit report),
// run (Monte Carlo sweep with table output and a reproducibility manifest),
// verify (control lower-bound regions plus truncation-discrepancy guard),
// explain-scheme (scheme defaults and resolved parameters).
//
// Exit codes: 0 success, 1 verification failure, 2 configuration error.

#include <CLI11.hpp>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spex/config.hpp"
#include "spex/estimator.hpp"
#include "spex/galerkin.hpp"
#include "spex/report.hpp"
#include "spex/variational.hpp"
#include "spex/version.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_verification_failure = 1;
constexpr int exit_config_error = 2;

std::string join_args(int argc, char** argv) {
  std::ostringstream out;
  for (int i = 0; i < argc; ++i) {
    if (i > 0) out << ' ';
    out << argv[i];
  }
  return out.str();
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  out << content;
}

int cmd_analyze(const spex::RunConfig& cfg) {
  const spex::SpectralModel m = spex::build_model(cfg.model);
  std::cout << spex::gap_report_text(m, spex::analyze_gaps(m));

  std::vector<double> ts = cfg.analyze.t_values;
  if (ts.empty()) ts = cfg.run.t_grid;
  if (ts.empty()) ts = {cfg.sim.horizon};
  std::cout << "minimal exit directions (L=" << cfg.sim.radius << "):\n";
  for (double T : ts) {
    const spex::MinimalExit me = spex::minimal_exit(m, cfg.sim.radius, T);
    std::cout << "  T=" << T << ": minimal exit: mode " << me.direction
              << ", rate " << me.value;
    if (me.degenerate) {
      std::cout << " (degenerate across modes";
      for (std::size_t k : me.tied_modes) std::cout << ' ' << k;
      std::cout << ')';
    }
    std::cout << '\n';
  }
  if (!cfg.analyze.points.empty()) {
    std::cout << "quasipotential probes:\n";
    for (const auto& p : cfg.analyze.points) {
      std::cout << "  V(";
      for (std::size_t i = 0; i < p.size(); ++i)
        std::cout << (i > 0 ? "," : "") << p[i];
      std::cout << ") = " << spex::quasipotential(m, p) << '\n';
    }
  }
  if (m.tail) {
    const spex::TailCheck tc = spex::check_tail(m);
    std::cout << "symbolic tail: noise trace "
              << (tc.noise_trace_converges ? "converges" : "diverges")
              << ", crossing times "
              << (tc.crossing_times_vanish ? "vanish eventually" : "persist")
              << '\n';
  }
  return exit_ok;
}

int cmd_run(spex::RunConfig cfg, const std::string& command) {
  cfg.validate();
  const spex::SpectralModel m = spex::build_model(cfg.model);
  const std::vector<double> eps_grid = cfg.run.eps_grid.empty()
                                           ? std::vector<double>{cfg.sim.eps}
                                           : cfg.run.eps_grid;
  const std::vector<double> t_grid = cfg.run.t_grid.empty()
                                         ? std::vector<double>{cfg.sim.horizon}
                                         : cfg.run.t_grid;
  const spex::WeightMode wm = spex::weight_mode_from_string(cfg.run.weight_mode);

  const std::vector<spex::SweepCell> cells =
      spex::sweep(m, cfg.sim, cfg.scheme, eps_grid, t_grid,
                  cfg.run.trajectories, cfg.run.seed, cfg.run.threads, wm);

  namespace fs = std::filesystem;
  const fs::path dir(cfg.run.out_dir);
  fs::create_directories(dir);
  std::vector<std::string> written;
  if (cfg.run.out_format == "csv") {
    write_file(dir / "results.csv",
               spex::sweep_csv(cells, cfg.sim, cfg.scheme, cfg.run.trajectories));
    written.push_back("results.csv");
  } else if (cfg.run.out_format == "md") {
    std::string md = "# exit probability estimates\n\n";
    md += spex::sweep_markdown(cells, eps_grid, t_grid, "estimate");
    md += "\n# relative error per sample\n\n";
    md += spex::sweep_markdown(cells, eps_grid, t_grid, "re_per_sample");
    write_file(dir / "results.md", md);
    written.push_back("results.md");
  } else {
    write_file(
        dir / "results.json",
        spex::sweep_json(cells, cfg.sim, cfg.scheme, cfg.run.trajectories)
                .dump(2) +
            "\n");
    written.push_back("results.json");
  }
  write_file(dir / "manifest.json", spex::manifest_json(cfg, command).dump(2) + "\n");
  written.push_back("manifest.json");

  if (cfg.run.emit_field) {
    // Deterministic minimal-exit profile at the template horizon, rendered on
    // the sine basis for human inspection.
    const spex::MinimalExit me =
        spex::minimal_exit(m, cfg.sim.radius, cfg.sim.horizon);
    std::vector<double> z(std::max<std::size_t>(me.direction, 1), 0.0);
    z[me.direction - 1] = cfg.sim.radius;
    const std::size_t grid = std::min<std::size_t>(cfg.sim.steps, 200);
    const spex::MinimizerTrajectory traj =
        spex::minimizer(m, cfg.sim.horizon, z, std::max<std::size_t>(grid, 1));
    std::vector<double> times;
    std::vector<std::vector<double>> coeffs;
    times.reserve(traj.samples.size());
    coeffs.reserve(traj.samples.size());
    for (const auto& s : traj.samples) {
      times.push_back(s.t);
      coeffs.push_back(s.y);
    }
    write_file(dir / "field.csv", spex::field_csv(times, coeffs, 65));
    written.push_back("field.csv");
  }

  std::size_t failed = 0;
  for (const auto& c : cells)
    if (!c.ok) ++failed;
  std::cout << "wrote";
  for (const auto& w : written) std::cout << ' ' << (dir / w).string();
  std::cout << " (" << cells.size() << " cells";
  if (failed > 0) std::cout << ", " << failed << " failed";
  std::cout << ")\n";
  for (const auto& c : cells)
    if (!c.ok)
      std::cout << "  cell eps=" << c.eps << " T=" << c.horizon << ": "
                << c.error << '\n';
  return exit_ok;
}

int cmd_verify(const spex::RunConfig& cfg) {
  cfg.validate();
  const spex::SpectralModel m = spex::build_model(cfg.model);

  spex::RegionReport rep;
  try {
    rep = spex::verify_regions(m, cfg.sim.radius, cfg.scheme, cfg.sim.eps,
                               10000, cfg.run.seed);
  } catch (const std::exception& e) {
    std::cerr << "precondition violation: " << e.what() << '\n';
    return exit_config_error;
  }
  std::cout << spex::region_report_text(rep);

  spex::SpectralModel m2 = m;
  const std::size_t N = cfg.sim.n_modes;
  if (!cfg.model.preset.empty() && m2.n_modes() < 2 * N) {
    m2 = spex::preset_model(cfg.model.preset, 2 * N);
    if (cfg.model.tail) m2.tail = cfg.model.tail;
  }
  if (m2.n_modes() < 2 * N) {
    std::cerr << "precondition violation: the discrepancy check needs a model "
                 "with 2N modes (explicit or preset)\n";
    return exit_config_error;
  }
  const std::size_t kd = std::min<std::size_t>(cfg.run.trajectories, 4000);
  const spex::DiscrepancyReport drep =
      spex::discrepancy_report(m2, cfg.sim, 0.75, kd, cfg.run.seed);
  std::cout << "coupled truncation discrepancy: N=" << drep.n_coarse << " vs "
            << drep.n_fine << ", empirical " << drep.empirical_sup_mean
            << " vs analytic bound " << drep.analytic_bound << " (ratio "
            << drep.ratio << ")\n";
  const bool ratio_ok = drep.ratio >= spex::discrepancy_ratio_lo &&
                        drep.ratio <= spex::discrepancy_ratio_hi;
  std::cout << "  ratio within calibrated guard [" << spex::discrepancy_ratio_lo
            << ", " << spex::discrepancy_ratio_hi
            << "]: " << (ratio_ok ? "yes" : "NO") << '\n';

  const bool pass = rep.pass && ratio_ok;
  std::cout << "verification: " << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? exit_ok : exit_verification_failure;
}

int cmd_explain(const std::optional<spex::RunConfig>& maybe_cfg) {
  const spex::SchemeConfig defaults;
  std::cout << "scheme defaults:\n"
            << "  variant: " << spex::to_string(defaults.variant) << '\n'
            << "  kappa: " << defaults.kappa << '\n'
            << "  eta: " << defaults.eta << '\n'
            << "  delta: " << defaults.delta_rule
            << " (resolves to 2*eps at run time)\n"
            << "  m_regularizer: 0 (0 resolves to eps^-kappa)\n"
            << "  t_star: 0 (0 resolves to (2 lambda_1^2 kappa/alpha_1) "
               "ln(1/eps))\n"
            << "  z1: 0 (0 resolves to L)\n"
            << "  projected_modes: [1]\n";
  if (!maybe_cfg) return exit_ok;
  const spex::RunConfig& cfg = *maybe_cfg;
  const spex::SpectralModel m = spex::build_model(cfg.model);
  const double eps = cfg.sim.eps;
  const double L = cfg.sim.radius;
  const double T = cfg.sim.horizon;
  const spex::ResolvedScheme r =
      spex::resolve_scheme(m, cfg.scheme, eps, L, T);
  std::cout << "resolved for eps=" << eps << ", L=" << L << ", T=" << T
            << ":\n"
            << "  variant: " << spex::to_string(cfg.scheme.variant) << '\n'
            << "  delta: " << r.delta << '\n';
  switch (cfg.scheme.variant) {
    case spex::SchemeVariant::none:
      std::cout << "  plain Monte Carlo (no change of measure)\n";
      break;
    case spex::SchemeVariant::scheme2:
    case spex::SchemeVariant::multimode: {
      const spex::MollifierState st =
          spex::scheme2_state(m, L, cfg.scheme.kappa, r.delta, eps, 0.0);
      std::cout << "  shifted level value: " << st.f_values[1] << '\n'
                << "  mollified value at the origin U_delta(0): "
                << st.u_delta << '\n'
                << "  stated second-moment coefficient "
                   "0.5*(1-eta)*U_delta(0): "
                << 0.5 * (1.0 - cfg.scheme.eta) * st.u_delta << '\n';
      if (cfg.scheme.variant == spex::SchemeVariant::multimode) {
        std::cout << "  projected modes:";
        for (std::size_t k : cfg.scheme.projected_modes) std::cout << ' ' << k;
        std::cout << '\n';
      }
      break;
    }
    case spex::SchemeVariant::scheme1: {
      std::cout << "  M: " << r.m_regularizer << "\n  t_star: " << r.t_star
                << "\n  z1: " << r.z1 << '\n';
      const spex::MollifierState st =
          spex::scheme1_state(m, L, cfg.scheme, eps, 0.0, T, 0.0);
      std::cout << "  mollified value at the origin U_delta(0, x1=0): "
                << st.u_delta << '\n'
                << "  stated second-moment coefficient 2*I1: "
                << 2.0 * L * L * spex::phi(m, 1, T) << '\n';
      break;
    }
  }
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "exit-probability estimation for small-noise diagonal SPDEs via "
      "importance sampling"};
  app.set_version_flag("--version", std::string(spex::version_string));
  app.require_subcommand(1);

  std::string config_a, config_r, config_v, config_e;
  std::vector<double> eps_grid, t_grid;
  std::size_t n_modes = 0, trajectories = 0;
  std::uint64_t seed = 0;
  std::string scheme_name, out_format, out_dir;
  double kappa = 0.0;
  unsigned threads = 0;
  bool emit_field = false;

  CLI::App* a_cmd = app.add_subcommand(
      "analyze",
      "print the spectral-gap report, crossing times, minimal exit "
      "directions, and quasipotential probes");
  a_cmd->add_option("config", config_a, "JSON config path")->required();

  CLI::App* r_cmd = app.add_subcommand(
      "run", "run the Monte Carlo sweep; writes result tables and a manifest");
  r_cmd->add_option("config", config_r, "JSON config path")->required();
  r_cmd->add_option("--eps-grid", eps_grid, "noise levels (comma separated)")
      ->delimiter(',');
  r_cmd->add_option("--T-grid", t_grid, "horizons (comma separated)")
      ->delimiter(',');
  r_cmd->add_option("--N", n_modes, "Galerkin truncation (sim.n_modes)");
  r_cmd->add_option("--K", trajectories, "trajectories per cell");
  r_cmd->add_option("--seed", seed, "base RNG seed");
  r_cmd->add_option("--scheme", scheme_name,
                    "none | scheme1 | scheme2 | multimode");
  r_cmd->add_option("--kappa", kappa, "shifted-level exponent in (0,1)");
  r_cmd->add_option("--threads", threads, "worker threads");
  r_cmd->add_option("--out-format", out_format, "csv | md | json")
      ->check(CLI::IsMember({"csv", "md", "json"}));
  r_cmd->add_option("--out-dir", out_dir, "output directory");
  r_cmd->add_flag("--emit-field", emit_field,
                  "also write field.csv: the minimal-exit profile X(t,xi) on "
                  "the sine basis");

  CLI::App* v_cmd = app.add_subcommand(
      "verify",
      "check the control lower bound over its regions and the truncation "
      "discrepancy guard");
  v_cmd->add_option("config", config_v, "JSON config path")->required();

  CLI::App* e_cmd = app.add_subcommand(
      "explain-scheme",
      "print scheme defaults and, given a config, the resolved parameters");
  e_cmd->add_option("config", config_e, "JSON config path (optional)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_config_error;
  }

  try {
    if (a_cmd->parsed()) return cmd_analyze(spex::load_config(config_a));
    if (r_cmd->parsed()) {
      spex::RunConfig cfg = spex::load_config(config_r);
      if (r_cmd->count("--eps-grid") > 0) cfg.run.eps_grid = eps_grid;
      if (r_cmd->count("--T-grid") > 0) cfg.run.t_grid = t_grid;
      if (r_cmd->count("--N") > 0) {
        cfg.sim.n_modes = n_modes;
        if (!cfg.model.preset.empty() && cfg.model.n_modes < n_modes)
          cfg.model.n_modes = n_modes;
      }
      if (r_cmd->count("--K") > 0) cfg.run.trajectories = trajectories;
      if (r_cmd->count("--seed") > 0) cfg.run.seed = seed;
      if (r_cmd->count("--scheme") > 0)
        cfg.scheme.variant = spex::scheme_variant_from_string(scheme_name);
      if (r_cmd->count("--kappa") > 0) cfg.scheme.kappa = kappa;
      if (r_cmd->count("--threads") > 0) cfg.run.threads = threads;
      if (r_cmd->count("--out-format") > 0) cfg.run.out_format = out_format;
      if (r_cmd->count("--out-dir") > 0) cfg.run.out_dir = out_dir;
      if (emit_field) cfg.run.emit_field = true;
      return cmd_run(std::move(cfg), join_args(argc, argv));
    }
    if (v_cmd->parsed()) return cmd_verify(spex::load_config(config_v));
    if (e_cmd->parsed()) {
      std::optional<spex::RunConfig> cfg;
      if (!config_e.empty()) cfg = spex::load_config(config_e);
      return cmd_explain(cfg);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_config_error;
  }
  return exit_config_error;
}
