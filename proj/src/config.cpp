#include "circlaw/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace circlaw {

using nlohmann::json;

namespace {

void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!ok.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

void read_opt(const json& j, const char* key, std::optional<double>& out, const std::string& where) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    out.reset();
    return;
  }
  double v = 0.0;
  read(j, key, v, where);
  out = v;
}

Complex complex_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ConfigError(where + ": expected a number or [re, im]");
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::macro_law: return "macro_law";
    case ExperimentKind::local_law: return "local_law";
    case ExperimentKind::distance: return "distance";
    case ExperimentKind::linear_statistic: return "linear_statistic";
    case ExperimentKind::invariants: return "invariants";
    case ExperimentKind::probes: return "probes";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& s) {
  for (auto k : {ExperimentKind::macro_law, ExperimentKind::local_law, ExperimentKind::distance,
                 ExperimentKind::linear_statistic, ExperimentKind::invariants,
                 ExperimentKind::probes}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown experiment kind '" + s + "'");
}

std::string to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::smooth_bump: return "smooth_bump";
    case ProfileKind::poly_bump: return "poly_bump";
    case ProfileKind::zero: return "zero";
  }
  return "unknown";
}

ProfileKind parse_profile_kind(const std::string& s) {
  for (auto k : {ProfileKind::smooth_bump, ProfileKind::poly_bump, ProfileKind::zero}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown profile '" + s + "'");
}

std::vector<std::string> known_checks(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::macro_law: return {"ks_radius", "ks_angle"};
    case ExperimentKind::local_law: return {"normalized_max", "residual_median"};
    case ExperimentKind::distance: return {"delta_star", "log_potential_error"};
    case ExperimentKind::linear_statistic: return {"ratio"};
    case ExperimentKind::invariants: return {};
    case ExperimentKind::probes: return {"ratio_spread", "exact_second_error"};
  }
  return {};
}

void ExperimentConfig::validate() const {
  try {
    ensemble.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (workers < 1) throw ConfigError("workers must be at least 1");
  if (r < 0.0) throw ConfigError("r must be non-negative");
  if (z_points.empty() && kind != ExperimentKind::probes && kind != ExperimentKind::macro_law &&
      kind != ExperimentKind::invariants) {
    throw ConfigError("z_points must not be empty");
  }
  const auto names = known_checks(kind);
  for (const auto& [name, thr] : checks) {
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw ConfigError("check '" + name + "' is not defined for kind " + to_string(kind));
    }
  }
  if (kind == ExperimentKind::linear_statistic && !(linear_statistic.a > 0.0 && linear_statistic.a < 0.5)) {
    throw ConfigError("linear_statistic.a must lie in (0, 1/2)");
  }
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  only_keys(j,
            {"kind", "ensemble", "z_points", "trials", "r", "grid", "constants", "linear_statistic",
             "probe", "solver", "write_spectra", "checks", "output_dir", "workers"},
            "config");
  std::string kind = to_string(c.kind);
  read(j, "kind", kind, "config");
  c.kind = parse_experiment_kind(kind);

  if (j.contains("ensemble")) {
    const json& e = j.at("ensemble");
    only_keys(e, {"n", "m", "law", "truncation", "seed"}, "ensemble");
    read(e, "n", c.ensemble.n, "ensemble");
    read(e, "m", c.ensemble.m, "ensemble");
    read(e, "seed", c.ensemble.base_seed, "ensemble");
    if (e.contains("law")) {
      const json& l = e.at("law");
      only_keys(l, {"kind", "tail_exponent", "p"}, "ensemble.law");
      std::string lk = to_string(c.ensemble.law.kind);
      read(l, "kind", lk, "ensemble.law");
      try {
        c.ensemble.law.kind = parse_law_kind(lk);
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(ex.what());
      }
      read(l, "tail_exponent", c.ensemble.law.tail_exponent, "ensemble.law");
      read(l, "p", c.ensemble.law.p, "ensemble.law");
    }
    if (e.contains("truncation")) {
      const json& t = e.at("truncation");
      only_keys(t, {"enabled", "D", "phi", "delta0"}, "ensemble.truncation");
      read(t, "enabled", c.ensemble.truncation.enabled, "ensemble.truncation");
      read(t, "D", c.ensemble.truncation.D, "ensemble.truncation");
      read(t, "phi", c.ensemble.truncation.phi, "ensemble.truncation");
      read(t, "delta0", c.ensemble.truncation.delta0, "ensemble.truncation");
    }
  }
  if (j.contains("z_points")) {
    const json& zs = j.at("z_points");
    if (!zs.is_array()) throw ConfigError("z_points: expected an array");
    c.z_points.clear();
    for (const auto& z : zs) c.z_points.push_back(complex_from_json(z, "z_points"));
  }
  read(j, "trials", c.trials, "config");
  read(j, "r", c.r, "config");
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    only_keys(g, {"A0", "V", "s_factor", "epsilon", "nodes_per_decade", "u_count", "u_values",
                  "v_count", "v_min"},
              "grid");
    read(g, "A0", c.grid.A0, "grid");
    read(g, "V", c.grid.V, "grid");
    read(g, "s_factor", c.grid.s_factor, "grid");
    read_opt(g, "epsilon", c.grid.epsilon, "grid");
    read(g, "nodes_per_decade", c.grid.nodes_per_decade, "grid");
    read(g, "u_count", c.grid.u_count, "grid");
    read(g, "u_values", c.grid.u_values, "grid");
    read(g, "v_count", c.grid.v_count, "grid");
    read_opt(g, "v_min", c.grid.v_min, "grid");
  }
  if (j.contains("constants")) {
    const json& k = j.at("constants");
    only_keys(k, {"tau", "C1", "C2", "c_qn", "log_power", "K", "omega_threshold"}, "constants");
    read(k, "tau", c.constants.tau, "constants");
    read(k, "C1", c.constants.C1, "constants");
    read(k, "C2", c.constants.C2, "constants");
    read(k, "c_qn", c.constants.c_qn, "constants");
    read(k, "log_power", c.constants.log_power, "constants");
    read(k, "K", c.constants.K, "constants");
    read(k, "omega_threshold", c.constants.omega_threshold, "constants");
  }
  if (j.contains("linear_statistic")) {
    const json& l = j.at("linear_statistic");
    only_keys(l, {"profile", "a"}, "linear_statistic");
    std::string pk = to_string(c.linear_statistic.profile);
    read(l, "profile", pk, "linear_statistic");
    c.linear_statistic.profile = parse_profile_kind(pk);
    read(l, "a", c.linear_statistic.a, "linear_statistic");
  }
  if (j.contains("probe")) {
    const json& p = j.at("probe");
    only_keys(p, {"kind", "n", "p_list", "trials"}, "probe");
    std::string pk = to_string(c.probe.kind);
    read(p, "kind", pk, "probe");
    try {
      c.probe.kind = parse_probe_kind(pk);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(ex.what());
    }
    read(p, "n", c.probe.n, "probe");
    read(p, "p_list", c.probe.p_list, "probe");
    read(p, "trials", c.probe.trials, "probe");
  }
  std::string solver = "svd";
  read(j, "solver", solver, "config");
  if (solver == "svd") c.solver = SpectrumSolver::svd;
  else if (solver == "hermitian") c.solver = SpectrumSolver::hermitian;
  else throw ConfigError("solver must be 'svd' or 'hermitian'");
  read(j, "write_spectra", c.write_spectra, "config");
  read(j, "checks", c.checks, "config");
  read(j, "output_dir", c.output_dir, "config");
  read(j, "workers", c.workers, "config");
  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json zs = json::array();
  for (const Complex& z : c.z_points) zs.push_back({z.real(), z.imag()});
  return {
      {"kind", to_string(c.kind)},
      {"ensemble",
       {{"n", c.ensemble.n},
        {"m", c.ensemble.m},
        {"seed", c.ensemble.base_seed},
        {"law",
         {{"kind", to_string(c.ensemble.law.kind)},
          {"tail_exponent", c.ensemble.law.tail_exponent},
          {"p", c.ensemble.law.p}}},
        {"truncation",
         {{"enabled", c.ensemble.truncation.enabled},
          {"D", c.ensemble.truncation.D},
          {"phi", c.ensemble.truncation.phi},
          {"delta0", c.ensemble.truncation.delta0}}}}},
      {"z_points", zs},
      {"trials", c.trials},
      {"r", c.r},
      {"grid",
       {{"A0", c.grid.A0},
        {"V", c.grid.V},
        {"s_factor", c.grid.s_factor},
        {"epsilon", opt_json(c.grid.epsilon)},
        {"nodes_per_decade", c.grid.nodes_per_decade},
        {"u_count", c.grid.u_count},
        {"u_values", c.grid.u_values},
        {"v_count", c.grid.v_count},
        {"v_min", opt_json(c.grid.v_min)}}},
      {"constants",
       {{"tau", c.constants.tau},
        {"C1", c.constants.C1},
        {"C2", c.constants.C2},
        {"c_qn", c.constants.c_qn},
        {"log_power", c.constants.log_power},
        {"K", c.constants.K},
        {"omega_threshold", c.constants.omega_threshold}}},
      {"linear_statistic",
       {{"profile", to_string(c.linear_statistic.profile)}, {"a", c.linear_statistic.a}}},
      {"probe",
       {{"kind", to_string(c.probe.kind)},
        {"n", c.probe.n},
        {"p_list", c.probe.p_list},
        {"trials", c.probe.trials}}},
      {"solver", c.solver == SpectrumSolver::svd ? "svd" : "hermitian"},
      {"write_spectra", c.write_spectra},
      {"checks", c.checks},
      {"output_dir", c.output_dir},
      {"workers", c.workers},
  };
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace circlaw
