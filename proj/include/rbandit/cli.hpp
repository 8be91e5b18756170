#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rbandit/config.hpp"
#include "rbandit/harness.hpp"
#include "rbandit/validation.hpp"

namespace rbandit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "RBANDIT_OUTPUT_DIR";

std::string tool_version();

struct RunRequest {
  ExperimentConfig config;
  std::string config_path;  // empty when no file was given
  bool plot = false;
  bool per_trial = false;
};

struct RunOutcome {
  std::string output_dir;
  std::vector<std::string> files;
  ExperimentResult result;
};

/// Runs the experiment and writes one curve CSV per policy, the manifest
/// and, on request, SVG plots and per-trial CSVs.
RunOutcome cmd_run(const RunRequest& request, std::ostream& log);

/// Runs the validation suite, writes the report CSV, and returns the exit
/// status: 0 if every row passed, 1 otherwise.
int cmd_validate_bounds(const ValidationOptions& options, const std::string& report_path, std::ostream& out);

FitReport cmd_fit(const std::string& csv_path, std::uint64_t t_min, std::uint64_t t_max);

/// Full command line entry point; returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rbandit
