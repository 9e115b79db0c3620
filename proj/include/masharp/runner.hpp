#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "masharp/config.hpp"

namespace masharp {

enum class Status { pass, fail, inconclusive };
const char* to_string(Status s);

struct SuiteVerdict {
  std::string suite;
  Status status = Status::inconclusive;
  std::string detail;  ///< the numbers that decided the verdict
};

/// Exit codes of `masharp run`.
enum ExitCode : int { exit_success = 0, exit_suite_failure = 1, exit_config_error = 2, exit_not_converged = 3 };

struct RunVerdict {
  std::string name;
  std::string claim;
  std::string output_dir;
  std::vector<SuiteVerdict> suites;
  bool converged = false;
  int exit_code = exit_config_error;
  std::string message;  ///< error text when the run stopped early
  nlohmann::json report;

  /// Verdict page written to verdict.txt and printed by the CLI.
  std::string summary() const;
};

struct RunOptions {
  std::string out_dir;         ///< overrides the config and environment
  bool solve_only = false;     ///< skip the suites and their artifacts
  std::ostream* log = nullptr; ///< progress lines, when set
};

/// Output directory: options.out_dir, else the config's output.dir, else
/// $MASHARP_OUT/<name>, else out/<name>.
std::string resolve_output_dir(const ExperimentConfig& cfg, const std::string& cli_out);

/// Solves on every grid in increasing order, runs the requested suites on
/// the finest one and writes the artifacts. Library errors are mapped to
/// exit codes; nothing is thrown.
RunVerdict run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

/// Loads the file, then runs it. Unreadable or invalid files give exit 2.
RunVerdict run_config_file(const std::string& path, const RunOptions& options = {});

struct PresetInfo {
  std::string name;
  std::string claim;
  std::string path;
};

/// Experiment files in `dir`, ordered by file name.
std::vector<PresetInfo> list_presets(const std::string& dir);

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace masharp
