#pragma once

// Command orchestration behind the trendlab executable. A RunConfig can be
// read from JSON and then overridden key by key from command-line text.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "trendlab/error.hpp"

namespace trendlab::cli {

inline constexpr std::string_view kVersion = "0.1.0";

struct RunConfig {
  std::string command;  // simulate | backtest | oracle | agents | mix | eigenrisk

  std::uint64_t seed = 1;
  std::string out = "out";
  std::string input;  // panel CSV; empty means simulate one

  // Model used when simulating.
  long n = 5;
  std::optional<long> T;  // panel length, or agent steps for `agents`
  double gamma = 0.01;
  double xi_ratio = 0.01;  // C_xi = xi_ratio * C_eps
  double drift = 0.02;     // mu_j = drift * vol_j for stocks and bonds

  // Estimators and strategies.
  double eta = 0.01;
  double eta_cov = 1.0 / 750.0;
  double eta_var = 0.01;
  std::string cleaner = "rie";
  double target_vol = 1.0;
  std::optional<long> warmup;
  std::optional<std::vector<std::string>> strategy;
  double step = 0.05;  // mix curve resolution

  // Oracle.
  long oracle_n = 2;
  long oracle_t = 500;
  long models = 20;
  double strength = 0.05;

  // Agents.
  long A = 1000;
  long N = 50;
  long M = 100;
  double j = 1.5;
  std::string jgrid = "0:0.5:4";

  long effective_T() const;
  std::vector<std::string> effective_strategies() const;

  /// Throws ConfigError.
  void validate() const;

  nlohmann::json to_json() const;
  /// Unknown keys are a ConfigError.
  void merge_json(const nlohmann::json& j);
  /// Parses `text` as the value of `key`.
  void set(std::string_view key, std::string_view text);

  /// Hash of every field except the output directory.
  std::string hash() const;
};

/// Names of every configurable key, in serialization order.
const std::vector<std::string>& config_keys();

/// "a:step:b" or "a,b,c".
std::vector<double> parse_grid(std::string_view text);

/// Runs the command and writes its artifacts under config.out. Returns the
/// paths written, manifest last.
std::vector<std::filesystem::path> run_command(const RunConfig& config);

/// 2 for configuration problems, 3 for input data, 4 for numerical failures.
int exit_code(ErrorKind kind);

/// Single-line machine-parsable error report.
std::string error_line(ErrorKind kind, std::string_view message);

}  // namespace trendlab::cli
