#include "spex/config.hpp"

#include <fstream>
#include <stdexcept>

#include "spex/version.hpp"

namespace spex {

namespace {

using nlohmann::json;

// Scheme delta accepts the string rule "2eps" or an explicit positive number.
void parse_delta(const json& j, SchemeConfig& s) {
  if (!j.contains("delta")) return;
  const json& d = j.at("delta");
  if (d.is_string()) {
    s.delta_rule = d.get<std::string>();
  } else if (d.is_number()) {
    s.delta_rule = "explicit";
    s.delta_value = d.get<double>();
  } else {
    throw std::invalid_argument(
        "config: scheme.delta must be the string '2eps' or a number");
  }
}

json delta_to_json(const SchemeConfig& s) {
  if (s.delta_rule == "explicit") return s.delta_value;
  return s.delta_rule;
}

std::optional<TailGrowth> parse_tail(const json& j) {
  if (!j.contains("tail") || j.at("tail").is_null()) return std::nullopt;
  const json& t = j.at("tail");
  TailGrowth g;
  g.c = t.value("c", g.c);
  g.p = t.value("p", g.p);
  g.d = t.value("d", g.d);
  g.q = t.value("q", g.q);
  return g;
}

}  // namespace

SpectralModel build_model(const ModelSection& section) {
  if (!section.preset.empty()) {
    SpectralModel m = preset_model(section.preset, section.n_modes);
    if (section.tail) m.tail = section.tail;
    return m;
  }
  SpectralModel m;
  m.alphas = section.alphas;
  m.lambdas = section.lambdas;
  m.tail = section.tail;
  m.validate();
  return m;
}

void RunConfig::validate() const {
  const SpectralModel m = build_model(model);
  sim.validate(m);
  scheme.validate();
  if (run.trajectories < 2)
    throw std::invalid_argument("config: run.trajectories must be >= 2");
  if (run.threads < 1)
    throw std::invalid_argument("config: run.threads must be >= 1");
  if (run.out_format != "csv" && run.out_format != "md" &&
      run.out_format != "json")
    throw std::invalid_argument(
        "config: run.out_format must be csv, md, or json");
  weight_mode_from_string(run.weight_mode);
  for (double e : run.eps_grid)
    if (!(e > 0.0))
      throw std::invalid_argument("config: eps_grid entries must be positive");
  for (double t : run.t_grid)
    if (!(t > 0.0))
      throw std::invalid_argument("config: t_grid entries must be positive");
  for (const auto& p : analyze.points)
    if (p.size() > m.n_modes())
      throw std::invalid_argument(
          "config: analyze.points entries must fit the model truncation");
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig cfg;
  try {
    if (j.contains("model")) {
      const json& jm = j.at("model");
      cfg.model.preset = jm.value("preset", cfg.model.preset);
      cfg.model.n_modes = jm.value("n_modes", cfg.model.n_modes);
      cfg.model.alphas = jm.value("alphas", cfg.model.alphas);
      cfg.model.lambdas = jm.value("lambdas", cfg.model.lambdas);
      cfg.model.tail = parse_tail(jm);
      if (cfg.model.preset.empty() && !cfg.model.alphas.empty())
        cfg.model.n_modes = cfg.model.alphas.size();
    }
    cfg.sim.n_modes = cfg.model.n_modes;  // default: simulate the full model
    if (j.contains("sim")) {
      const json& js = j.at("sim");
      cfg.sim.eps = js.value("eps", cfg.sim.eps);
      cfg.sim.horizon = js.value("horizon", cfg.sim.horizon);
      cfg.sim.radius = js.value("radius", cfg.sim.radius);
      cfg.sim.steps = js.value("steps", cfg.sim.steps);
      cfg.sim.n_modes = js.value("n_modes", cfg.sim.n_modes);
      cfg.sim.initial = js.value("initial", cfg.sim.initial);
    }
    if (j.contains("scheme")) {
      const json& jc = j.at("scheme");
      cfg.scheme.variant = scheme_variant_from_string(
          jc.value("variant", std::string(to_string(cfg.scheme.variant))));
      cfg.scheme.kappa = jc.value("kappa", cfg.scheme.kappa);
      cfg.scheme.eta = jc.value("eta", cfg.scheme.eta);
      parse_delta(jc, cfg.scheme);
      cfg.scheme.m_regularizer =
          jc.value("m_regularizer", cfg.scheme.m_regularizer);
      cfg.scheme.t_star = jc.value("t_star", cfg.scheme.t_star);
      cfg.scheme.z1 = jc.value("z1", cfg.scheme.z1);
      cfg.scheme.projected_modes =
          jc.value("projected_modes", cfg.scheme.projected_modes);
    }
    if (j.contains("run")) {
      const json& jr = j.at("run");
      cfg.run.trajectories = jr.value("trajectories", cfg.run.trajectories);
      cfg.run.seed = jr.value("seed", cfg.run.seed);
      cfg.run.threads = jr.value("threads", cfg.run.threads);
      cfg.run.eps_grid = jr.value("eps_grid", cfg.run.eps_grid);
      cfg.run.t_grid = jr.value("t_grid", cfg.run.t_grid);
      cfg.run.out_format = jr.value("out_format", cfg.run.out_format);
      cfg.run.out_dir = jr.value("out_dir", cfg.run.out_dir);
      cfg.run.weight_mode = jr.value("weight_mode", cfg.run.weight_mode);
      cfg.run.emit_field = jr.value("emit_field", cfg.run.emit_field);
    }
    if (j.contains("analyze")) {
      const json& ja = j.at("analyze");
      cfg.analyze.t_values = ja.value("t_values", cfg.analyze.t_values);
      cfg.analyze.points = ja.value("points", cfg.analyze.points);
    }
    // "meta" (and any other unknown section) is ignored, so a results
    // manifest loads back as the config that produced it.
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return cfg;
}

nlohmann::json config_to_json(const RunConfig& cfg) {
  json j;
  j["model"] = {{"preset", cfg.model.preset},
                {"n_modes", cfg.model.n_modes},
                {"alphas", cfg.model.alphas},
                {"lambdas", cfg.model.lambdas}};
  if (cfg.model.tail) {
    j["model"]["tail"] = {{"c", cfg.model.tail->c},
                          {"p", cfg.model.tail->p},
                          {"d", cfg.model.tail->d},
                          {"q", cfg.model.tail->q}};
  } else {
    j["model"]["tail"] = nullptr;
  }
  j["sim"] = {{"eps", cfg.sim.eps},       {"horizon", cfg.sim.horizon},
              {"radius", cfg.sim.radius}, {"steps", cfg.sim.steps},
              {"n_modes", cfg.sim.n_modes}, {"initial", cfg.sim.initial}};
  j["scheme"] = {{"variant", to_string(cfg.scheme.variant)},
                 {"kappa", cfg.scheme.kappa},
                 {"eta", cfg.scheme.eta},
                 {"delta", delta_to_json(cfg.scheme)},
                 {"m_regularizer", cfg.scheme.m_regularizer},
                 {"t_star", cfg.scheme.t_star},
                 {"z1", cfg.scheme.z1},
                 {"projected_modes", cfg.scheme.projected_modes}};
  j["run"] = {{"trajectories", cfg.run.trajectories},
              {"seed", cfg.run.seed},
              {"threads", cfg.run.threads},
              {"eps_grid", cfg.run.eps_grid},
              {"t_grid", cfg.run.t_grid},
              {"out_format", cfg.run.out_format},
              {"out_dir", cfg.run.out_dir},
              {"weight_mode", cfg.run.weight_mode},
              {"emit_field", cfg.run.emit_field}};
  j["analyze"] = {{"t_values", cfg.analyze.t_values},
                  {"points", cfg.analyze.points}};
  return j;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("config: cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw std::invalid_argument("config '" + path + "': " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const std::exception& e) {
    throw std::invalid_argument("config '" + path + "': " + e.what());
  }
}

nlohmann::json manifest_json(const RunConfig& cfg, const std::string& command) {
  json j = config_to_json(cfg);
  j["meta"] = {{"version", version_string},
               {"rng_scheme", rng_scheme_id},
               {"command", command}};
  return j;
}

WeightMode weight_mode_from_string(const std::string& s) {
  if (s == "joint") return WeightMode::joint;
  if (s == "diagonal") return WeightMode::diagonal;
  throw std::invalid_argument("weight mode must be 'joint' or 'diagonal'");
}

}  // namespace spex
