#pragma once
// Table emitters. CSV carries full double precision (%.17g) so identical runs
// produce byte-identical files apart from the wall_time_s column; Markdown
// mirrors the grid layout (eps rows, T columns) with "-" marking zero-success
// cells; JSON is an array of cell objects.

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spex/controls.hpp"
#include "spex/dynamics.hpp"
#include "spex/estimator.hpp"
#include "spex/galerkin.hpp"
#include "spex/model.hpp"

namespace spex {

// Header: eps,T,N,K,scheme,estimate,std_err,re_per_sample,ci_low,ci_high,
//         exit_fraction,e1_concentration,invalid_count,wall_time_s
std::string sweep_csv(const std::vector<SweepCell>& cells,
                      const SimConfig& sim_template, const SchemeConfig& scheme,
                      std::size_t K);

// One table per field; field is "estimate" or "re_per_sample".
std::string sweep_markdown(const std::vector<SweepCell>& cells,
                           const std::vector<double>& eps_grid,
                           const std::vector<double>& t_grid,
                           const std::string& field);

nlohmann::json sweep_json(const std::vector<SweepCell>& cells,
                          const SimConfig& sim_template,
                          const SchemeConfig& scheme, std::size_t K);

std::string gap_report_text(const SpectralModel& m, const GapReport& gap);
std::string region_report_text(const RegionReport& rep);

// Header: N,gamma,eps,T,analytic_bound,empirical_sup_mean,ratio
std::string discrepancy_csv(const std::vector<DiscrepancyReport>& rows);

// Field reconstruction X(t, xi) = sum_k Theta_k sqrt(2) sin(k pi xi) on a
// uniform xi-grid; rows are (t, values...).
std::string field_csv(const std::vector<double>& times,
                      const std::vector<std::vector<double>>& coeffs,
                      std::size_t xi_points);

}  // namespace spex
