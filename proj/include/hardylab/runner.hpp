#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "hardylab/config.hpp"

namespace hardylab {

inline constexpr const char* kToolVersion = "hardylab 0.1.0";

/// Exit codes of `run`.
enum ExitCode : int {
  exit_ok = 0,
  exit_check_failed = 1,
  exit_bad_config = 2,
  exit_not_converged = 3,
  exit_precondition = 4,
  exit_mesh_quality = 5,
  exit_internal = 6,
};

struct Artifact {
  std::string name;
  std::string content;
};

/// Everything a run produces. `summary` holds "checks" entries with fields
/// check, lhs, rhs, residual, pass, plus command-specific "values".
struct RunOutput {
  nlohmann::json summary;
  std::vector<Artifact> files;  ///< CSV files followed by summary.json
  bool pass = true;
};

/// Runs the configured command in memory. Module errors propagate.
RunOutput execute(const RunConfig& config);

/// Writes every artifact into `dir`, creating it when needed.
void write_artifacts(const RunOutput& output, const std::filesystem::path& dir);

/// execute + write_artifacts with errors mapped to exit codes. Nothing is
/// written unless the command completes.
int run(const RunConfig& config, std::ostream& log);

/// Parses `text` and runs it; an invalid config returns exit_bad_config.
int run_text(const std::string& text, std::ostream& log, const std::string* output_override = nullptr);

}  // namespace hardylab
