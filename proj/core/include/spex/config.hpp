#pragma once
// JSON run configuration with sections model / sim / scheme / run (plus an
// optional analyze section for the analysis front end). A results manifest is
// the fully resolved config plus a "meta" object (version, RNG scheme id);
// loaders ignore "meta", so manifests round-trip as configs.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spex/controls.hpp"
#include "spex/dynamics.hpp"
#include "spex/model.hpp"

namespace spex {

struct ModelSection {
  std::string preset;  // "integer-squares" | "dirichlet-laplacian-1d" | "" for explicit
  std::size_t n_modes = 4;
  std::vector<double> alphas;   // explicit spectrum when preset is empty
  std::vector<double> lambdas;
  std::optional<TailGrowth> tail;
};

struct RunSection {
  std::size_t trajectories = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::vector<double> eps_grid;  // empty = single cell at sim.eps
  std::vector<double> t_grid;    // empty = single cell at sim.horizon
  std::string out_format = "csv";  // csv | md | json
  std::string out_dir = "out";
  std::string weight_mode = "joint";  // joint | diagonal
  bool emit_field = false;
};

struct AnalyzeSection {
  std::vector<double> t_values;              // horizons for the gap table
  std::vector<std::vector<double>> points;   // quasipotential probe points
};

struct RunConfig {
  ModelSection model;
  SimConfig sim;
  SchemeConfig scheme;
  RunSection run;
  AnalyzeSection analyze;

  void validate() const;  // throws std::invalid_argument
};

SpectralModel build_model(const ModelSection& section);

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);

// Reads and parses; errors carry file/key context in the exception message.
RunConfig load_config(const std::string& path);

// Resolved config + meta (version string, RNG scheme id, invoked command).
nlohmann::json manifest_json(const RunConfig& cfg, const std::string& command);

WeightMode weight_mode_from_string(const std::string& s);

}  // namespace spex
