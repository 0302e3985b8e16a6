#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ldplab/config.hpp"

namespace ldplab {

inline constexpr const char* kVersion = "0.1.0";

struct RunOptions {
  std::filesystem::path out_dir = ".";
  /// Replaces every seed in the config.
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
  /// Replaces cfg["experiment"].
  std::optional<std::string> experiment;
};

struct RunOutcome {
  /// 0, or 3 after a numerical failure (the manifest records it).
  int exit_code = 0;
  Json manifest;
  /// Written files, relative to out_dir, in write order.
  std::vector<std::string> files;
};

std::vector<std::string> experiment_kinds();

/// Config after the command-line overrides; this is what gets hashed.
Json effective_config(Json cfg, const RunOptions& opts);

/// Runs one experiment and writes manifest.json, timing.json and its CSV
/// (and SVG when cfg.plot is true) outputs. ConfigError propagates before
/// anything is written.
RunOutcome run_experiment(const Json& cfg, const RunOptions& opts);

}  // namespace ldplab
