#pragma once

#include <json.hpp>

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "circlaw/ensembles.hpp"
#include "circlaw/limit_law.hpp"
#include "circlaw/probes.hpp"
#include "circlaw/spectra.hpp"
#include "circlaw/test_functions.hpp"

namespace circlaw {

/// Malformed or inconsistent configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ExperimentKind { macro_law, local_law, distance, linear_statistic, invariants, probes };

std::string to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(const std::string& s);

struct Constants {
  double tau = 0.5;
  double C1 = 20.0;
  double C2 = 20.0;
  double c_qn = 1.0;
  double log_power = 5.0;
  double K = 10.0;                 // operator-norm bound for the Omega event
  double omega_threshold = 1e-8;   // least singular value floor

  bool operator==(const Constants&) const = default;
};

struct LinearStatisticParams {
  ProfileKind profile = ProfileKind::smooth_bump;
  double a = 0.25;

  bool operator==(const LinearStatisticParams&) const = default;
};

struct ProbeParams {
  ProbeKind kind = ProbeKind::linear_rosenthal;
  int n = 1000;
  std::vector<double> p_list{2.0, 4.0, 8.0};
  int trials = 10000;

  bool operator==(const ProbeParams&) const = default;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::macro_law;
  EnsembleSpec ensemble;
  std::vector<Complex> z_points{{0.5, 0.0}};
  int trials = 1;
  double r = 0.0;
  GridParams grid;
  Constants constants;
  LinearStatisticParams linear_statistic;
  ProbeParams probe;
  SpectrumSolver solver = SpectrumSolver::svd;
  bool write_spectra = false;
  /// Acceptance thresholds by name; the meaning depends on `kind`.
  std::map<std::string, double> checks;
  std::string output_dir = "circlaw-out";
  int workers = 1;

  bool operator==(const ExperimentConfig&) const = default;
  void validate() const;
};

/// Throws ConfigError on unknown keys or ill-typed values.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::string& path);

std::string to_string(ProfileKind k);
ProfileKind parse_profile_kind(const std::string& s);

/// Names accepted in `checks` for each kind.
std::vector<std::string> known_checks(ExperimentKind k);

}  // namespace circlaw
