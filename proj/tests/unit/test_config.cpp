#include <string>

#include "cfsim/config.hpp"
#include "doctest.h"

using namespace cfsim;

namespace {

std::string field_of(const std::string& json) {
  try {
    parse_config(json);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("presets") {
  const SimConfig f1 = preset("fig1");
  CHECK(f1.geometry.num_aps == 100);
  CHECK(f1.geometry.antennas_per_ap == 4);
  CHECK(f1.geometry.num_ues == 40);
  CHECK(f1.num_urllc == 8);
  CHECK(f1.num_slots == 5);
  CHECK(f1.tau_d == 570);
  CHECK(f1.n_d == 114);
  CHECK(f1.strategies.size() == 4);
  CHECK(f1.precoders.size() == 2);
  REQUIRE(f1.policies.size() == 2);
  CHECK(f1.policies[0].omega == 0.2);
  CHECK(f1.policies[0].nu == 0.5);
  CHECK(f1.policies[1].name == "EPA");
  CHECK(f1.policies[1].nu == 0.0);

  CHECK(preset("fig2").precoders == std::vector<PrecoderScheme>{PrecoderScheme::kLpMmse});

  const SimConfig f3 = preset("fig3");
  CHECK(f3.geometry.antennas_per_ap == 16);
  CHECK(f3.num_slots == 2);
  CHECK(f3.n_d == 285);
  REQUIRE(f3.policies.size() == 1);
  CHECK(f3.policies[0].omega == 0.8);
  CHECK(f3.policies[0].nu == 0.5);

  CHECK_THROWS_AS(preset("fig4"), ConfigError);
}

TEST_CASE("parse_config overrides a preset base") {
  const SimConfig c = parse_config(R"({"preset": "fig3", "n_drops": 3, "M": 8,
      "strategies": ["NPu", "SPC"], "precoders": ["MR"], "master_seed": 99})");
  CHECK(c.n_drops == 3);
  CHECK(c.geometry.antennas_per_ap == 8);
  CHECK(c.num_slots == 2);
  CHECK(c.strategies == std::vector<Strategy>{Strategy::kNpu, Strategy::kSpc});
  CHECK(c.precoders == std::vector<PrecoderScheme>{PrecoderScheme::kMr});
  CHECK(c.master_seed == 99);
}

TEST_CASE("scalar omega/nu and explicit policy lists") {
  const SimConfig a = parse_config(R"({"omega": 0.3, "nu": 1.0})");
  REQUIRE(a.policies.size() == 1);
  CHECK(a.policies[0].omega == 0.3);
  CHECK(a.policies[0].nu == 1.0);
  const SimConfig b = parse_config(
      R"({"policies": [{"name": "A", "omega": 0.1, "nu": 0.2}, {"name": "B", "omega": 0.9}]})");
  REQUIRE(b.policies.size() == 2);
  CHECK(b.policies[1].name == "B");
  CHECK(field_of(R"({"policies": [], "omega": 0.3})") == "policies");
  CHECK(field_of(R"({"policies": [{"name": "A", "w": 0.1}]})") == "policies.w");
  CHECK(field_of(R"({"policies": [{"name": "A"}, {"name": "A"}]})") == "policies");
  CHECK(field_of(R"({"policies": [{"name": "a,b"}]})") == "policies");
}

TEST_CASE("validation names the offending field") {
  CHECK(field_of(R"({"bogus": 1})") == "bogus");
  CHECK(field_of(R"({"L": 0})") == "L");
  CHECK(field_of(R"({"K": 400})") == "M");
  CHECK(field_of(R"({"alpha": 1.5})") == "alpha");
  CHECK(field_of(R"({"tau_p": 0})") == "tau_p");
  CHECK(field_of(R"({"tau_p": 600})") == "tau_p");
  CHECK(field_of(R"({"T": 0})") == "T");
  CHECK(field_of(R"({"T": 600})") == "T");
  CHECK(field_of(R"({"omega": 1.0})") == "omega");
  CHECK(field_of(R"({"a_u": -0.1})") == "a_u");
  CHECK(field_of(R"({"eps_target": 0})") == "eps_target");
  CHECK(field_of(R"({"strategies": []})") == "strategies");
  CHECK(field_of(R"({"strategies": ["SPC", "SPC"]})") == "strategies");
  CHECK(field_of(R"({"strategies": ["XYZ"]})") == "strategies");
  CHECK(field_of(R"({"precoders": ["ZF"]})") == "precoders");
  CHECK(field_of(R"({"n_blocks": 1})") == "n_blocks");
  CHECK(field_of(R"({"n_mc_trials": 10})") == "n_mc_trials");
  CHECK(field_of(R"({"L": "many"})") == "L");
  CHECK(field_of(R"({"preset": "fig9"})") == "preset");
  CHECK(field_of("[1, 2]") == "<document>");
  CHECK(field_of("{not json") == "<document>");
  CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), ConfigError);
}

TEST_CASE("to_json round-trips") {
  SimConfig c = preset("fig3");
  c.n_drops = 7;
  c.master_seed = 12345678901234ULL;
  c.policies.push_back({"EPA", 0.5, 0.0});
  validate_config(c);
  const SimConfig d = parse_config(to_json(c));
  CHECK(to_json(d) == to_json(c));
  CHECK(d.master_seed == c.master_seed);
  CHECK(d.n_d == c.n_d);
}
