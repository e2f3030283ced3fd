// JSON configuration: defaults, full-fidelity round trips, the manifest
// contract (meta is emitted but ignored on load), delta rule parsing, file
// loading with contextual errors, and structural validation.

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "spex/config.hpp"

namespace {

using nlohmann::json;
using spex::build_model;
using spex::config_from_json;
using spex::config_to_json;
using spex::load_config;
using spex::manifest_json;
using spex::RunConfig;
using spex::SchemeVariant;
using spex::TailGrowth;
using spex::weight_mode_from_string;
using spex::WeightMode;

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream out(path);
  out << text;
  return path;
}

TEST(Config, DefaultsAndModelInheritance) {
  const auto cfg = config_from_json(json::parse(
      R"({"model": {"preset": "integer-squares"}})"));
  EXPECT_EQ(cfg.model.preset, "integer-squares");
  EXPECT_EQ(cfg.model.n_modes, 4u);
  // sim simulates the full model unless overridden.
  EXPECT_EQ(cfg.sim.n_modes, 4u);
  EXPECT_DOUBLE_EQ(cfg.sim.eps, 0.1);
  EXPECT_DOUBLE_EQ(cfg.sim.horizon, 1.0);
  EXPECT_DOUBLE_EQ(cfg.sim.radius, 1.0);
  EXPECT_EQ(cfg.sim.steps, 100u);
  EXPECT_EQ(cfg.scheme.variant, SchemeVariant::scheme2);
  EXPECT_DOUBLE_EQ(cfg.scheme.kappa, 0.6);
  EXPECT_EQ(cfg.scheme.delta_rule, "2eps");
  EXPECT_EQ(cfg.run.trajectories, 100000u);
  EXPECT_EQ(cfg.run.seed, 1u);
  EXPECT_EQ(cfg.run.threads, 1u);
  EXPECT_EQ(cfg.run.out_format, "csv");
  EXPECT_EQ(cfg.run.weight_mode, "joint");
  EXPECT_FALSE(cfg.run.emit_field);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, ExplicitSpectrumSetsModeCount) {
  const auto cfg = config_from_json(json::parse(
      R"({"model": {"alphas": [1, 3.5, 9], "lambdas": [1, 0.8, 0.5]}})"));
  EXPECT_TRUE(cfg.model.preset.empty());
  EXPECT_EQ(cfg.model.n_modes, 3u);
  EXPECT_EQ(cfg.sim.n_modes, 3u);

  // An explicit sim.n_modes still wins.
  const auto cfg2 = config_from_json(json::parse(
      R"({"model": {"alphas": [1, 3.5, 9], "lambdas": [1, 0.8, 0.5]},
          "sim": {"n_modes": 2}})"));
  EXPECT_EQ(cfg2.sim.n_modes, 2u);
}

RunConfig dense_config() {
  RunConfig cfg;
  cfg.model.preset = "";
  cfg.model.n_modes = 3;
  cfg.model.alphas = {1.0, 3.5, 9.25};
  cfg.model.lambdas = {1.0, 0.75, 0.5};
  cfg.model.tail = TailGrowth{2.0, 1.5, 0.5, 0.25};
  cfg.sim.eps = 0.07;
  cfg.sim.horizon = 6.5;
  cfg.sim.radius = 1.25;
  cfg.sim.steps = 640;
  cfg.sim.n_modes = 2;
  cfg.sim.initial = {0.25, -0.125};
  cfg.scheme.variant = SchemeVariant::scheme1;
  cfg.scheme.kappa = 0.55;
  cfg.scheme.eta = 0.2;
  cfg.scheme.delta_rule = "explicit";
  cfg.scheme.delta_value = 0.015;
  cfg.scheme.m_regularizer = 12.0;
  cfg.scheme.t_star = 1.75;
  cfg.scheme.z1 = 0.5;
  cfg.scheme.projected_modes = {1};
  cfg.run.trajectories = 4096;
  cfg.run.seed = 9001;
  cfg.run.threads = 2;
  cfg.run.eps_grid = {0.1, 0.05};
  cfg.run.t_grid = {2.0, 4.0};
  cfg.run.out_format = "json";
  cfg.run.out_dir = "results";
  cfg.run.weight_mode = "diagonal";
  cfg.run.emit_field = true;
  cfg.analyze.t_values = {1.0, 12.0};
  cfg.analyze.points = {{0.5, 0.1}, {0.0, 0.9}};
  return cfg;
}

TEST(Config, JsonRoundTripIsLossless) {
  const RunConfig cfg = dense_config();
  const json j = config_to_json(cfg);
  const RunConfig back = config_from_json(j);
  // Serializing the reparsed config must reproduce the same document.
  EXPECT_EQ(config_to_json(back), j);
  // Spot-check representative fields of every section.
  EXPECT_EQ(back.model.alphas, cfg.model.alphas);
  ASSERT_TRUE(back.model.tail.has_value());
  EXPECT_DOUBLE_EQ(back.model.tail->p, 1.5);
  EXPECT_DOUBLE_EQ(back.model.tail->q, 0.25);
  EXPECT_EQ(back.sim.initial, cfg.sim.initial);
  EXPECT_EQ(back.scheme.variant, SchemeVariant::scheme1);
  EXPECT_EQ(back.scheme.delta_rule, "explicit");
  EXPECT_DOUBLE_EQ(back.scheme.delta_value, 0.015);
  EXPECT_EQ(back.run.eps_grid, cfg.run.eps_grid);
  EXPECT_EQ(back.run.weight_mode, "diagonal");
  EXPECT_TRUE(back.run.emit_field);
  EXPECT_EQ(back.analyze.points, cfg.analyze.points);
}

TEST(Config, ManifestLoadsBackAsItsConfig) {
  const RunConfig cfg = dense_config();
  const json man = manifest_json(cfg, "run --config demo.json");
  ASSERT_TRUE(man.contains("meta"));
  EXPECT_TRUE(man.at("meta").contains("version"));
  EXPECT_TRUE(man.at("meta").contains("rng_scheme"));
  EXPECT_EQ(man.at("meta").at("command"), "run --config demo.json");
  // meta is ignored on load; the manifest is a valid config.
  const RunConfig back = config_from_json(man);
  EXPECT_EQ(config_to_json(back), config_to_json(cfg));
}

TEST(Config, DeltaAcceptsRuleStringOrNumber) {
  auto with_delta = [](const char* payload) {
    return config_from_json(json::parse(std::string(
        R"({"model": {"preset": "integer-squares"}, "scheme": {"delta": )") +
        payload + "}}"));
  };
  const auto rule = with_delta("\"2eps\"");
  EXPECT_EQ(rule.scheme.delta_rule, "2eps");
  const auto fixed = with_delta("0.01");
  EXPECT_EQ(fixed.scheme.delta_rule, "explicit");
  EXPECT_DOUBLE_EQ(fixed.scheme.delta_value, 0.01);
  EXPECT_THROW(with_delta("true"), std::invalid_argument);
}

TEST(Config, TypeErrorsCarryContext) {
  EXPECT_THROW(
      config_from_json(json::parse(R"({"sim": {"eps": "small"}})")),
      std::invalid_argument);
  EXPECT_THROW(
      config_from_json(json::parse(R"({"scheme": {"variant": "scheme9"}})")),
      std::invalid_argument);
}

TEST(Config, LoadReportsPathOnFailure) {
  try {
    load_config("/nonexistent/path/run.json");
    FAIL() << "expected a throw";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/path/run.json"),
              std::string::npos);
  }

  const std::string bad = write_temp("bad_config.json", "{not json");
  try {
    load_config(bad);
    FAIL() << "expected a throw";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find(bad), std::string::npos);
  }

  const std::string good = write_temp(
      "good_config.json",
      config_to_json(dense_config()).dump(2));
  const RunConfig cfg = load_config(good);
  EXPECT_EQ(config_to_json(cfg), config_to_json(dense_config()));
  std::remove(bad.c_str());
  std::remove(good.c_str());
}

TEST(Config, ValidateRejectsBadRunSettings) {
  auto base = [] {
    return config_from_json(
        json::parse(R"({"model": {"preset": "integer-squares"}})"));
  };
  {
    auto c = base();
    c.run.trajectories = 1;
    EXPECT_THROW(c.validate(), std::invalid_argument);
  }
  {
    auto c = base();
    c.run.threads = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
  }
  {
    auto c = base();
    c.run.out_format = "xml";
    EXPECT_THROW(c.validate(), std::invalid_argument);
  }
  {
    auto c = base();
    c.run.weight_mode = "mixed";
    EXPECT_THROW(c.validate(), std::invalid_argument);
  }
  {
    auto c = base();
    c.run.eps_grid = {0.1, -0.2};
    EXPECT_THROW(c.validate(), std::invalid_argument);
  }
  {
    auto c = base();
    c.run.t_grid = {0.0};
    EXPECT_THROW(c.validate(), std::invalid_argument);
  }
  {
    auto c = base();
    c.analyze.points = {{0.1, 0.2, 0.3, 0.4, 0.5}};  // 5 > 4 modes
    EXPECT_THROW(c.validate(), std::invalid_argument);
  }
}

TEST(Config, BuildModelCoversPresetAndExplicitPaths) {
  spex::ModelSection sec;
  sec.preset = "integer-squares";
  sec.n_modes = 6;
  sec.tail = TailGrowth{3.0, 2.0, 1.0, 0.0};  // override the preset tail
  const auto m = build_model(sec);
  EXPECT_EQ(m.n_modes(), 6u);
  EXPECT_DOUBLE_EQ(m.alphas[5], 36.0);
  ASSERT_TRUE(m.tail.has_value());
  EXPECT_DOUBLE_EQ(m.tail->c, 3.0);

  spex::ModelSection bad;
  bad.alphas = {1.0};
  bad.lambdas = {1.0, 2.0};  // length mismatch
  EXPECT_THROW(build_model(bad), std::invalid_argument);
}

TEST(Config, WeightModeParsing) {
  EXPECT_EQ(weight_mode_from_string("joint"), WeightMode::joint);
  EXPECT_EQ(weight_mode_from_string("diagonal"), WeightMode::diagonal);
  EXPECT_THROW(weight_mode_from_string("other"), std::invalid_argument);
}

}  // namespace
