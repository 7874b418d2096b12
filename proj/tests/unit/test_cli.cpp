#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "cli/experiments.hpp"
#include "cli/presets.hpp"

using namespace activemedia;
using namespace activemedia::cli;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string error_of(const std::string& text) {
  try {
    validate(parse(text));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

const ExperimentConfig& find(const std::vector<ExperimentConfig>& configs, const std::string& name) {
  auto it = std::find_if(configs.begin(), configs.end(), [&](const auto& c) { return c.name == name; });
  REQUIRE_MESSAGE(it != configs.end(), name);
  return *it;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("ini config parses sections, comments and lists") {
  const auto c = parse(R"(
; leading comment
[experiment]
kind = boundary
name = edge
c_oe_values = 0.1:0.5:5
predicate = one-to-one   # trailing comment
[system]
n_excitable = 1
second_oscillator = false
c_oe = 0.4
c_eo = 0.2
b = 1.2
[integrator]
method = dp45
t_record = 900
[output]
dir = out
)");
  CHECK(c.kind == ExperimentKind::Boundary);
  CHECK(c.name == "edge");
  REQUIRE(c.c_oe_values.size() == 5);
  CHECK(c.c_oe_values.front() == doctest::Approx(0.1));
  CHECK(c.c_oe_values.back() == doctest::Approx(0.5));
  CHECK(c.predicate == "one-to-one");
  CHECK(c.chain.n_excitable == 1);
  CHECK_FALSE(c.chain.second_oscillator);
  CHECK(c.chain.b == doctest::Approx(1.2));
  CHECK(c.integrator.method == IntegratorConfig::Method::DormandPrince45);
  CHECK(c.integrator.t_record == 900.0);
  CHECK(c.out_dir == "out");
}

TEST_CASE("unknown keys and sections are rejected with their name") {
  std::string msg;
  try {
    parse("[experiment]\nkind = simulate\n[system]\ncoe = 0.4\n");
  } catch (const ConfigError& e) {
    msg = e.what();
  }
  CHECK(msg.find("system.coe") != std::string::npos);
  CHECK_THROWS_AS(parse("[experiment]\nkind = simulate\n[plots]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[system]\nc_oe = 0.4\n"), ConfigError);
}

TEST_CASE("malformed and out-of-range values name the field") {
  CHECK(error_of("[experiment]\nkind = simulate\n[system]\nc_oe = abc\n").find("system.c_oe") != std::string::npos);
  CHECK(error_of("[experiment]\nkind = simulate\n[system]\nc_oe = -0.2\n").find("system.c_oe") != std::string::npos);
  CHECK(error_of("[experiment]\nkind = simulate\n[integrator]\ndt = 0\n").find("integrator.dt") != std::string::npos);
  CHECK(error_of("[experiment]\nkind = boundary\npredicate = sometimes\nc_oe_values = 0.5\n")
            .find("experiment.predicate") != std::string::npos);
  CHECK(error_of("[experiment]\nkind = simulate\n").empty());
}

TEST_CASE("configs round-trip through ini and json") {
  auto c = parse("[experiment]\nkind = heterogeneity\nline_start = 0.1, 0.6\nline_end = 0.95, 0.2\n"
                 "target = 1:1-s\n[system]\nsecond_harmonic = 0.2\nc_ee = 0.3\n[integrator]\nrel_tol = 1e-9\n");
  c.c_oe_values = {0.1, 1.0 / 3.0};
  std::istringstream ini(to_ini(c));
  CHECK(parse_config(ini) == c);
  CHECK(config_from_json(to_json(c)) == c);
  const auto j = to_json(c);
  CHECK(j.at("experiment").at("target") == "1:1-s");
  CHECK(j.at("system").at("c_ee") == 0.3);
}

TEST_CASE("ml model switches integrator defaults") {
  const auto c = parse("[experiment]\nkind = simulate\n[system]\nmodel = ml\ng_oe = 0.4\n");
  CHECK(c.model == Model::MorrisLecar);
  CHECK(c.integrator == IntegratorConfig::ml_defaults());
  CHECK(c.ml.g_oe == 0.4);
}

TEST_CASE("predicates parse") {
  CHECK_NOTHROW(make_predicate("fires"));
  CHECK_NOTHROW(make_predicate("ratio>=0.5"));
  CHECK_NOTHROW(make_predicate("ratio>0.5"));
  CHECK_NOTHROW(make_predicate("1:2-s"));
  CHECK_THROWS(make_predicate("ratio>=x"));
}

// Caption parameters transcribed independently of the preset code.
struct CaptionValue {
  const char* figure;
  const char* experiment;
  double c_oe_start, c_eo_start, c_oe_end, c_eo_end;
  const char* target;
};

TEST_CASE("presets carry the published homotopy lines") {
  const CaptionValue lines[] = {
      {"fig3", "fig3_zero_to_one", 0.1, 0.15, 0.95, 0.05, "0:1-s"},
      {"fig3", "fig3_one_to_two", 0.1, 0.22, 0.95, 0.06, "1:2-s"},
      {"fig3", "fig3_one_to_one", 0.1, 0.3, 0.95, 0.075, "1:1-s"},
      {"fig7", "fig7_one_to_one", 0.1, 0.6, 0.95, 0.2, "1:1-s"},
      {"fig7", "fig7_antiphase", 0.1, 0.35, 0.7, 0.15, "0:1-a"},
      {"fig7", "fig7_one_to_two", 0.1, 0.44, 0.8, 0.174, "1:2-s"},
      {"fig7", "fig7_one_to_three", 0.2, 0.36, 0.71, 0.19, "1:3-s"},
      {"fig7", "fig7_beta_first_one_to_two", 0.15, 0.422, 0.406, 0.308, "1:2-s"},
      {"fig7", "fig7_beta_first_antiphase", 0.15, 0.422, 0.406, 0.308, "0:1-a"},
      {"fig7", "fig7_beta_second_one_to_two", 0.406, 0.308, 0.82, 0.167, "1:2-s"},
      {"fig7", "fig7_beta_second_antiphase", 0.406, 0.308, 0.82, 0.167, "0:1-a"},
      {"fig7", "fig7_alpha_one_to_one", 0.836, 0.17, 0.981, 0.109, "1:1-s"},
      {"fig7", "fig7_alpha_antiphase", 0.836, 0.17, 0.981, 0.109, "0:1-a"},
  };
  for (const auto& row : lines) {
    CAPTURE(row.experiment);
    const auto configs = preset(row.figure);
    const auto& c = find(configs, row.experiment);
    CHECK(c.kind == ExperimentKind::Heterogeneity);
    CHECK(c.line_start.first == row.c_oe_start);
    CHECK(c.line_start.second == row.c_eo_start);
    CHECK(c.line_end.first == row.c_oe_end);
    CHECK(c.line_end.second == row.c_eo_end);
    CHECK(c.target == row.target);
    CHECK(c.samples == 25);
    CHECK(c.chain.b == 1.1);
    CHECK(c.chain.c_ee == (std::string(row.figure) == "fig7" ? 0.5 : 0.0));
    CHECK(c.chain.n_excitable == (std::string(row.figure) == "fig7" ? 2 : 1));
  }
}

TEST_CASE("presets carry the published parameter points") {
  SUBCASE("rotation inset") {
    const auto& c = find(preset("fig1"), "fig1_rotation");
    CHECK(c.c_oe_values == std::vector<double>{0.1, 0.3, 0.5, 0.7});
    CHECK(c.chain.n_excitable == 1);
    CHECK_FALSE(c.chain.second_oscillator);
  }
  SUBCASE("pitchfork panels") {
    const auto configs = preset("fig5");
    const std::pair<const char*, double> panels[] = {{"fig5_a", 0.10}, {"fig5_b", 0.13}, {"fig5_c", 0.15}};
    for (const auto& [name, c_eo] : panels) {
      const auto& c = find(configs, name);
      CHECK(c.chain.c_oe == 0.78);
      CHECK(c.chain.c_eo == c_eo);
      CHECK(c.chain.c_ee == 0.5);
    }
  }
  SUBCASE("chaos") {
    const auto& c = find(preset("fig6"), "fig6_chaos");
    CHECK(c.chain.c_oe == 0.11);
    CHECK(c.chain.c_eo == 0.49);
    CHECK(c.chain.c_ee == 0.5);
    CHECK(c.poincare);
    CHECK(c.poincare_coordinate == 0);
    CHECK(c.poincare_level == 1.0);
  }
  SUBCASE("weak coupling") {
    const auto& c = find(preset("fig8w"), "fig8w_reduction");
    CHECK(c.c_oe_values == std::vector<double>{0.3, 0.5, 0.7, 0.9});
  }
  SUBCASE("three excitable cells") {
    const auto& c = find(preset("fig9"), "fig9_bistability");
    CHECK(c.chain.n_excitable == 3);
    CHECK(c.chain.c_oe == 0.75);
    CHECK(c.chain.c_eo == 0.25);
    CHECK(c.chain.c_ee == 0.18);
    CHECK(c.n_ic == 32);
  }
  SUBCASE("long chain") {
    const auto configs = preset("fig10");
    const std::pair<const char*, std::pair<double, double>> panels[] = {
        {"fig10_a", {1.0, 1.0}}, {"fig10_b", {1.1, 0.9}}, {"fig10_c", {1.5, 0.5}}};
    for (const auto& [name, freqs] : panels) {
      const auto& c = find(configs, name);
      CHECK(c.chain.n_excitable == 100);
      CHECK(c.chain.c_oe == 0.7);
      CHECK(c.chain.c_eo == 2.0);
      CHECK(c.chain.c_ee == 3.0);
      REQUIRE(c.chain.end_frequencies.has_value());
      CHECK(*c.chain.end_frequencies == freqs);
    }
  }
  SUBCASE("morris-lecar points") {
    const auto configs = preset("fig11-points");
    const std::pair<const char*, std::pair<double, double>> panels[] = {
        {"fig11_b", {0.4, 0.05}}, {"fig11_c", {0.5, 0.057}}, {"fig11_d", {0.63, 0.05}}, {"fig11_e", {0.1, 0.065}}};
    for (const auto& [name, g] : panels) {
      const auto& c = find(configs, name);
      CHECK(c.model == Model::MorrisLecar);
      CHECK(c.ml.g_ee == 0.1);
      CHECK(c.g_oe_values == std::vector<double>{g.first});
      CHECK(c.g_eo_values == std::vector<double>{g.second});
    }
  }
}

TEST_CASE("every preset validates and honours options") {
  PresetOptions options;
  options.seed = 99;
  options.out_dir = "elsewhere";
  options.scale = 0.5;
  for (const auto& id : preset_ids()) {
    CAPTURE(id);
    const auto configs = preset(id, options);
    CHECK_FALSE(configs.empty());
    for (const auto& c : configs) {
      CHECK_NOTHROW(validate(c));
      CHECK(c.seed == 99);
      CHECK(c.out_dir == "elsewhere");
    }
  }
  CHECK(find(preset("fig4", options), "fig4_regions").c_oe_values.size() == 20);
  CHECK_THROWS_AS(preset("fig12"), std::invalid_argument);
  options.scale = 0.0;
  CHECK_THROWS_AS(preset("fig1", options), std::invalid_argument);
}

TEST_CASE("rotation experiment: weak forcing leaves the excitable cell at rest") {
  const auto c = parse(R"(
[experiment]
kind = rotation
c_oe_values = 0.3
c_eo_values = 0.05, 0.5
[system]
n_excitable = 1
second_oscillator = false
c_oe = 0.3
[integrator]
t_record = 500
)");
  const auto result = run_experiment(c);
  REQUIRE(result.tables.size() == 1);
  const auto& rows = result.tables[0].rows;
  REQUIRE(rows.size() == 2);
  CHECK(std::abs(std::stod(rows[0][2])) < 1e-9);
  CHECK(std::stod(rows[1][2]) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("reruns with a fixed seed write identical files") {
  const auto dir = std::filesystem::temp_directory_path() / "activemedia_cli_determinism";
  std::filesystem::remove_all(dir);
  auto c = parse(R"(
[experiment]
kind = bistability
seed = 11
n_ic = 6
c_oe_values = 0.5
c_eo_values = 0.5
[system]
n_excitable = 1
c_ee = 0
c_oe = 0.5
c_eo = 0.5
[integrator]
t_transient = 200
t_record = 200
)");
  c.out_dir = (dir / "a").string();
  write_result(c, run_experiment(c));
  c.out_dir = (dir / "b").string();
  write_result(c, run_experiment(c));
  int compared = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir / "a")) {
    if (entry.path().extension() != ".csv") continue;
    CHECK(slurp(entry.path()) == slurp(dir / "b" / entry.path().filename()));
    ++compared;
  }
  CHECK(compared > 0);
  std::filesystem::remove_all(dir);
}
