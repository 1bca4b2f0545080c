#pragma once

// Config-driven runner behind the lll_lab tool.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lll/waves.hpp"

namespace lll::app {

using nlohmann::json;

enum ExitCode : int { kPass = 0, kFail = 1, kConfigError = 2 };

struct ExperimentConfig {
  std::string command = "verify";
  std::size_t N = 64;
  double dt = 0.0;  // 0: default_time_step
  double t_final = 1.0;
  double M = 3.0;
  std::vector<double> M_list;
  std::vector<double> kappa;
  std::vector<double> separations;
  std::vector<double> t_list;
  std::vector<double> snapshot_times;
  double sample_interval = 0.1;
  std::size_t samples = 60;
  bool doubling = false;  // multisoliton: also run the α_♯-doubled ensemble
  EnsembleMode mode = EnsembleMode::DistinctSpeeds;
  std::vector<WaveSpec> waves;
  int sigma = -1;
  std::filesystem::path out = "lll_out";
  std::uint64_t seed = 20240917;
  json raw;  // the parsed document, echoed into every artifact
};

/// Throws ConfigError for unknown keys' values, wrong types, non-positive
/// sizes and ensembles that fail validation.
ExperimentConfig parse_config(const json& doc);

/// 64-bit FNV-1a of the canonical dump, as 16 hex digits.
std::string config_hash(const json& doc);

/// Runs config.command, writes artifacts under config.out and prints a
/// pass/fail table to `table`. Returns an ExitCode.
int run(const ExperimentConfig& config, std::ostream& table);

}  // namespace lll::app
