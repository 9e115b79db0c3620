// masharp command-line entry point.

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "masharp/runner.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#ifndef MASHARP_PRESET_DIR
#define MASHARP_PRESET_DIR "presets"
#endif

namespace {

std::string preset_dir() {
  if (const char* env = std::getenv("MASHARP_PRESETS"); env && *env) return env;
  return MASHARP_PRESET_DIR;
}

// A bare name that is not a file refers to a shipped preset.
std::string locate(const std::string& arg) {
  namespace fs = std::filesystem;
  if (fs::exists(arg)) return arg;
  const fs::path candidate = fs::path(preset_dir()) / (arg + ".json");
  if (fs::exists(candidate)) return candidate.string();
  return arg;
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

int run(const std::string& target, const std::string& out, bool verbose, bool solve_only) {
  masharp::RunOptions opt;
  opt.out_dir = out;
  opt.solve_only = solve_only;
  if (verbose) opt.log = &std::cerr;
  const auto verdict = masharp::run_config_file(locate(target), opt);
  if (verdict.output_dir.empty()) {
    std::cerr << "error: " << verdict.message << '\n';
    return verdict.exit_code;
  }
  std::cout << verdict.summary();
  if (!verdict.output_dir.empty()) std::cout << "artifacts: " << verdict.output_dir << '\n';
  return verdict.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monge-Ampere boundary regularity experiments"};
  app.require_subcommand(1);

  std::string target, out;
  int threads = 0;
  bool verbose = false;

  auto* run_cmd = app.add_subcommand("run", "Solve and run the configured analysis suites");
  run_cmd->add_option("config", target, "Experiment file or preset name")->required();
  run_cmd->add_option("--out", out, "Output directory");
  run_cmd->add_option("--threads", threads, "Worker thread cap")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--verbose", verbose, "Print solver progress to stderr");

  auto* solve_cmd = app.add_subcommand("solve", "Solve only and write solution.csv");
  solve_cmd->add_option("config", target, "Experiment file or preset name")->required();
  solve_cmd->add_option("--out", out, "Output directory");
  solve_cmd->add_option("--threads", threads, "Worker thread cap")->check(CLI::PositiveNumber);
  solve_cmd->add_flag("--verbose", verbose, "Print solver progress to stderr");

  auto* presets_cmd = app.add_subcommand("presets", "List the shipped experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : masharp::exit_config_error;
  }
  set_threads(threads);

  if (*presets_cmd) {
    for (const auto& p : masharp::list_presets(preset_dir()))
      std::cout << std::left << std::setw(22) << p.name << p.claim << '\n';
    return 0;
  }
  return run(target, out, verbose, solve_cmd->parsed());
}
