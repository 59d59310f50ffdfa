#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>

#include "phase_engine/config.hpp"

using namespace phase_engine;

TEST_CASE("defaults round trip through text") {
  const RunConfig defaults;
  const std::string text = serialize_config(defaults);
  const RunConfig parsed = parse_config(text);
  CHECK(serialize_config(parsed) == text);
  CHECK(config_hash(parsed) == config_hash(defaults));
}

TEST_CASE("every advertised key accepts its own serialized value") {
  const RunConfig defaults;
  RunConfig scratch;
  for (const std::string& key : config_keys()) {
    const std::string text = serialize_config(defaults);
    const std::size_t at = text.find(key + " = ");
    REQUIRE(at != std::string::npos);
    const std::size_t eol = text.find('\n', at);
    const std::string value = text.substr(at + key.size() + 3, eol - at - key.size() - 3);
    apply_override(scratch, key, value);
  }
  CHECK(config_hash(scratch) == config_hash(defaults));
}

TEST_CASE("unknown keys are reported by name") {
  CHECK_THROWS_WITH_AS(parse_config("bath.lambda = 1\n"),
                       doctest::Contains("bath.lambda"), ConfigError);
  RunConfig config;
  CHECK_THROWS_AS(apply_override(config, "bath.lambda", "1"), ConfigError);
}

TEST_CASE("parse errors carry the line number") {
  const std::string text = "bath.eta = 0.5\nbath.s = 1.0\nbath.omega_c = frog\n";
  CHECK_THROWS_WITH_AS(parse_config(text), doctest::Contains("line 3"), ConfigError);
}

TEST_CASE("json and flat syntax agree") {
  const std::string flat = "bath.eta = 0.25\nbath.omega_c = 4\nevolution.t_max = 12\n";
  const std::string json = R"({"bath": {"eta": 0.25, "omega_c": 4}, "evolution": {"t_max": 12}})";
  CHECK(config_hash(parse_config(flat)) == config_hash(parse_config(json)));
}

TEST_CASE("later overrides win") {
  RunConfig config;
  apply_override(config, "bath.eta", "0.3");
  apply_override(config, "bath.eta", "0.7");
  CHECK(config.bath.eta == doctest::Approx(0.7));
  CHECK(config_hash(config) != config_hash(RunConfig{}));
}

TEST_CASE("emit lists are validated") {
  RunConfig config;
  apply_override(config, "output.emit", "moments,wigner");
  CHECK(config.emit == std::vector<std::string>{"moments", "wigner"});
  CHECK_THROWS_AS(apply_override(config, "output.emit", "moments,frogs"), ConfigError);
  CHECK_THROWS_AS(apply_override(config, "output.emit", "wigner,wigner"), ConfigError);
}

TEST_CASE("enumerated values are checked") {
  RunConfig config;
  CHECK_THROWS_AS(apply_override(config, "bath.cutoff", "soft"), ConfigError);
  CHECK_THROWS_AS(apply_override(config, "coupling.model", "dipole"), ConfigError);
  CHECK_THROWS_AS(apply_override(config, "evolution.method", "euler"), ConfigError);
  CHECK_THROWS_AS(apply_override(config, "initial.kind", "ghost"), ConfigError);
  apply_override(config, "bath.cutoff", "hard");
  CHECK(config.bath.cutoff == CutoffKind::hard);
}

TEST_CASE("incompatible pairings are rejected when building states") {
  RunConfig config;
  apply_override(config, "coupling.model", "qbm");
  apply_override(config, "initial.kind", "fock");
  apply_override(config, "bath.n_modes", "8");
  const DiscreteBath bath = make_bath(config);
  CHECK_THROWS_AS(make_initial(config, bath), ConfigError);

  RunConfig warm;
  apply_override(warm, "initial.kind", "collective_fock1");
  apply_override(warm, "bath.temperature", "0.5");
  apply_override(warm, "bath.n_modes", "8");
  CHECK_THROWS_AS(make_initial(warm, make_bath(warm)), ConfigError);
}

TEST_CASE("eta sweeps scale with the critical coupling when relative") {
  RunConfig config;
  apply_override(config, "transition.eta_min", "0.5");
  apply_override(config, "transition.eta_max", "2.0");
  apply_override(config, "transition.n_eta", "4");

  const std::vector<double> relative = sweep_etas(config);
  REQUIRE(relative.size() == 4);

  apply_override(config, "transition.relative", "false");
  const std::vector<double> absolute = sweep_etas(config);
  CHECK(absolute[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(absolute[3] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(relative[0] > absolute[0] * 0.5);  // scaled by eta_c = 2 pi / 10

  apply_override(config, "transition.eta_max", "0.1");
  CHECK_THROWS_AS(sweep_etas(config), ConfigError);
}

TEST_CASE("booleans and integers are strict") {
  RunConfig config;
  CHECK_THROWS_AS(apply_override(config, "grid.auto", "yes"), ConfigError);
  CHECK_THROWS_AS(apply_override(config, "bath.n_modes", "12.5"), ConfigError);
  CHECK_THROWS_AS(apply_override(config, "bath.n_modes", "-3"), ConfigError);
  apply_override(config, "grid.auto", "false");
  CHECK(config.grid_auto == false);
}
