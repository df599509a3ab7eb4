#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "circlaw/config.hpp"

namespace circlaw {

struct CheckOutcome {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct VerificationReport {
  nlohmann::json config;
  /// Deterministic part: a pure function of (config, seed).
  nlohmann::json statistics;
  std::vector<CheckOutcome> checks;
  std::size_t tasks = 0;
  std::size_t discarded = 0;
  double wall_seconds = 0.0;
  int workers = 1;
  std::vector<std::string> files;

  bool all_pass() const;
  nlohmann::json to_json() const;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
  bool write_files = true;
};

/// --workers flag, then CIRCLAW_WORKERS, then the config value.
int resolve_workers(const ExperimentConfig& cfg, std::optional<int> flag);

std::string config_hash(const ExperimentConfig& cfg);
std::string version_string();

VerificationReport run(ExperimentConfig cfg, const RunOptions& opts = {});

}  // namespace circlaw
