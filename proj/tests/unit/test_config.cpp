#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "circlaw/config.hpp"
#include "circlaw/harness.hpp"

using namespace circlaw;
using nlohmann::json;

namespace {

json sample_config() {
  return json::parse(R"({
    "kind": "local_law",
    "ensemble": {"n": 128, "m": 2, "seed": 99,
                 "law": {"kind": "heavy_tail", "tail_exponent": 6.0},
                 "truncation": {"enabled": true, "D": 1.5, "phi": 0.05}},
    "z_points": [0.5, [0.1, -0.2]],
    "trials": 3,
    "r": 0.001,
    "grid": {"A0": 2.0, "V": 3.0, "u_values": [0.0, 0.4], "v_count": 7, "epsilon": 0.2},
    "constants": {"tau": 0.4, "C1": 10.0},
    "solver": "hermitian",
    "write_spectra": true,
    "checks": {"normalized_max": 20.0},
    "output_dir": "somewhere",
    "workers": 3
  })");
}

struct EnvGuard {
  explicit EnvGuard(const char* value) {
    if (value) ::setenv("CIRCLAW_WORKERS", value, 1);
    else ::unsetenv("CIRCLAW_WORKERS");
  }
  ~EnvGuard() { ::unsetenv("CIRCLAW_WORKERS"); }
};

}  // namespace

TEST_CASE("parse and round trip") {
  const auto c = config_from_json(sample_config());
  CHECK(c.kind == ExperimentKind::local_law);
  CHECK(c.ensemble.n == 128);
  CHECK(c.ensemble.m == 2);
  CHECK(c.ensemble.base_seed == 99);
  CHECK(c.ensemble.law.kind == LawKind::heavy_tail);
  CHECK(c.ensemble.truncation.enabled);
  REQUIRE(c.z_points.size() == 2);
  CHECK(c.z_points[1] == Complex(0.1, -0.2));
  CHECK(c.grid.epsilon.has_value());
  CHECK(c.grid.u_values.size() == 2);
  CHECK(c.constants.tau == 0.4);
  CHECK(c.constants.C2 == 20.0);
  CHECK(c.solver == SpectrumSolver::hermitian);
  CHECK(c.checks.at("normalized_max") == 20.0);
  CHECK(config_from_json(config_to_json(c)) == c);
  CHECK(config_from_json(json::parse(config_to_json(c).dump())) == c);

  const ExperimentConfig defaults = config_from_json(json::object());
  CHECK(defaults == ExperimentConfig{});
  CHECK(config_from_json(config_to_json(defaults)) == defaults);
}

TEST_CASE("unknown keys are rejected at every level") {
  const char* paths[][2] = {{"", "bogus"},          {"ensemble", "size"}, {"grid", "u"},
                            {"constants", "C3"},    {"ensemble", "law"},  {"probe", "q"},
                            {"linear_statistic", "b"}};
  for (auto [where, key] : paths) {
    json j = sample_config();
    if (std::string(where).empty()) {
      j[key] = 1;
    } else if (std::string(key) == "law") {
      j["ensemble"]["law"]["weird"] = 1;
    } else {
      j[where][key] = 1;
    }
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
  }
  json t = sample_config();
  t["ensemble"]["truncation"]["extra"] = true;
  CHECK_THROWS_AS(config_from_json(t), ConfigError);
}

TEST_CASE("ill-typed and invalid values") {
  auto with = [](const char* key, json v) {
    json j = sample_config();
    j[key] = v;
    return j;
  };
  CHECK_THROWS_AS(config_from_json(with("trials", "three")), ConfigError);
  CHECK_THROWS_AS(config_from_json(with("trials", 0)), ConfigError);
  CHECK_THROWS_AS(config_from_json(with("workers", 0)), ConfigError);
  CHECK_THROWS_AS(config_from_json(with("r", -1.0)), ConfigError);
  CHECK_THROWS_AS(config_from_json(with("kind", "nonsense")), ConfigError);
  CHECK_THROWS_AS(config_from_json(with("solver", "qr")), ConfigError);
  CHECK_THROWS_AS(config_from_json(with("z_points", json::array({json::array({1, 2, 3})}))), ConfigError);
  CHECK_THROWS_AS(config_from_json(with("z_points", "0.5")), ConfigError);
  CHECK_THROWS_AS(config_from_json(with("z_points", json::array())), ConfigError);
  json law = sample_config();
  law["ensemble"]["law"]["kind"] = "cauchy";
  CHECK_THROWS_AS(config_from_json(law), ConfigError);
  json n = sample_config();
  n["ensemble"]["n"] = 0;
  CHECK_THROWS_AS(config_from_json(n), ConfigError);
  json a = sample_config();
  a["kind"] = "linear_statistic";
  a["checks"] = json::object();
  a["linear_statistic"] = {{"a", 0.5}};
  CHECK_THROWS_AS(config_from_json(a), ConfigError);
}

TEST_CASE("check names depend on the experiment kind") {
  json j = sample_config();
  j["checks"] = {{"ks_radius", 0.1}};
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  j["kind"] = "macro_law";
  CHECK_NOTHROW(config_from_json(j));
  for (auto k : {ExperimentKind::macro_law, ExperimentKind::local_law, ExperimentKind::distance,
                 ExperimentKind::linear_statistic, ExperimentKind::probes, ExperimentKind::invariants}) {
    CHECK(parse_experiment_kind(to_string(k)) == k);
  }
  CHECK(known_checks(ExperimentKind::invariants).empty());
}

TEST_CASE("load_config") {
  const auto dir = std::filesystem::temp_directory_path() / "circlaw_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "good.json") << sample_config().dump(2);
    std::ofstream(dir / "bad.json") << "{\"kind\": \"macro_law\", ";
  }
  CHECK(load_config((dir / "good.json").string()) == config_from_json(sample_config()));
  CHECK_THROWS_AS(load_config((dir / "bad.json").string()), ConfigError);
  CHECK_THROWS_AS(load_config((dir / "missing.json").string()), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("worker count priority: flag, environment, config") {
  ExperimentConfig c;
  c.workers = 3;
  {
    EnvGuard g(nullptr);
    CHECK(resolve_workers(c, std::nullopt) == 3);
    CHECK(resolve_workers(c, 5) == 5);
  }
  {
    EnvGuard g("7");
    CHECK(resolve_workers(c, std::nullopt) == 7);
    CHECK(resolve_workers(c, 2) == 2);
  }
  {
    EnvGuard g("many");
    CHECK_THROWS_AS(resolve_workers(c, std::nullopt), ConfigError);
  }
}

TEST_CASE("config hash") {
  const auto c = config_from_json(sample_config());
  auto d = c;
  CHECK(config_hash(c) == config_hash(d));
  CHECK(config_hash(c).size() == 16);
  d.trials = 4;
  CHECK(config_hash(c) != config_hash(d));
  CHECK(version_string().rfind("v", 0) == 0);
}
