#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pwlab/config.hpp"

namespace pwlab::cli {

/// Commands: simulate2d, simulate3d, planewave-check, picard, stability, heatdecay,
/// contraction, scan, "cgl evolve", "cgl planewave-check", "cgl stability".
std::vector<std::string> commands();
/// Throws config::ConfigError for unknown commands.
const config::Schema& schema_for(const std::string& command);

struct RunOptions {
  std::string command;
  std::filesystem::path config;  // empty: config_text is used
  std::string config_text;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;  // overrides the `seed` key
  int threads = 1;
};

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  std::string bound;  // e.g. "<= 1e-06", "in [-0.35, -0.15]"
  std::string detail;
};

struct RunResult {
  int exit_code = 2;  // 0 all checks passed, 1 a check failed, 2 error
  std::string status;
  std::vector<Check> checks;
  std::string error;
};

/// Resolves the config, writes manifest.json (before and after the run),
/// diagnostics.csv, summary.json and optional snapshots/ into opts.out.
/// The output directory must be absent or empty.
RunResult run(const RunOptions& opts, std::ostream* log = nullptr);

/// Resolved config in the flat text format, loadable again with --config.
std::string render_config(const config::Resolved& cfg);

}  // namespace pwlab::cli
