#include "spex/estimator.hpp"

#include <cmath>
#include <stdexcept>

#include "spex/rng.hpp"

namespace spex {

EstimateReport estimate(const SpectralModel& m, const SimConfig& sim,
                        const SchemeConfig& scheme, std::size_t K,
                        std::uint64_t seed, unsigned threads, WeightMode wm,
                        std::uint64_t context) {
  if (scheme.variant == SchemeVariant::none) {
    return estimate_with_control(m, sim, ZeroControl{}, K, seed, threads, wm,
                                 context);
  }
  const SchemeControl ctrl(m, scheme, sim.eps, sim.radius, sim.horizon);
  return estimate_with_control(m, sim, ctrl, K, seed, threads, wm, context);
}

std::optional<double> exit_direction_stat(
    const std::vector<TrajectoryOutcome>& outcomes, double L) {
  if (!(L > 0.0))
    throw std::invalid_argument("exit_direction_stat: need L > 0");
  detail::Neumaier sum;
  std::size_t n_exit = 0;
  for (const auto& o : outcomes) {
    if (!o.valid || !o.exited) continue;
    const double x1 = o.exit_coeffs.empty() ? 0.0 : o.exit_coeffs[0];
    sum.add(x1 * x1 / (L * L));
    ++n_exit;
  }
  if (n_exit == 0) return std::nullopt;
  return sum.get() / static_cast<double>(n_exit);
}

std::vector<SweepCell> sweep(const SpectralModel& m,
                             const SimConfig& sim_template,
                             const SchemeConfig& scheme,
                             const std::vector<double>& eps_grid,
                             const std::vector<double>& t_grid, std::size_t K,
                             std::uint64_t seed, unsigned threads,
                             WeightMode wm) {
  if (eps_grid.empty() || t_grid.empty())
    throw std::invalid_argument("sweep: grids must be nonempty");
  const double h = sim_template.h();
  std::vector<SweepCell> cells;
  cells.reserve(eps_grid.size() * t_grid.size());
  for (std::size_t ie = 0; ie < eps_grid.size(); ++ie) {
    for (std::size_t it = 0; it < t_grid.size(); ++it) {
      SweepCell cell;
      cell.i_eps = ie;
      cell.i_t = it;
      cell.eps = eps_grid[ie];
      cell.horizon = t_grid[it];
      try {
        SimConfig sim = sim_template;
        sim.eps = cell.eps;
        sim.horizon = cell.horizon;
        const double raw_steps = cell.horizon / h;
        sim.steps = static_cast<std::size_t>(std::llround(raw_steps));
        if (sim.steps < 1) sim.steps = 1;
        cell.report = estimate(m, sim, scheme, K, seed, threads, wm,
                               cell_context(seed, ie, it));
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.ok = false;
        cell.error = e.what();
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

}  // namespace spex
