#pragma once

#include <optional>
#include <string>
#include <vector>

#include "masharp/estimate.hpp"
#include "masharp/expression.hpp"
#include "masharp/problem.hpp"

namespace masharp {

/// Acceptance bands read from the experiment file. Missing entries mean
/// "report only".
struct VerdictBands {
  // convergence
  double convergence_order_min = 0.7;
  double error_floor = 1e-10;  ///< errors at or below this count as exact
  // growth
  GrowthOptions growth;
  // pogorelov
  double pogorelov_spread = 10.0;
  int pogorelov_levels = 5;
  // integrability
  std::optional<Interval> delta_star;
  std::optional<double> convergent_delta;  ///< delta that must classify as convergent
  std::optional<double> divergent_delta;   ///< delta that must classify as divergent
  // slicing
  double slicing_fraction = 0.5;
  // hadamard; negative means 10 * newton_tolerance / lambda
  double hadamard_residual = -1.0;
  // degenerate
  DegenerateOptions degenerate;
  int max_outer_iters = 50;
  // oracle
  double oracle_relative = 0.05;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::string claim;
  ProblemSpec problem;
  std::optional<Expression> exact;  ///< closed-form solution, for convergence studies
  std::vector<int> grid;
  SolverConfig solver;
  bool warm_start = true;
  std::vector<std::string> suites;
  VerdictBands bands;
  std::string output_dir;  ///< empty: chosen by the runner
  std::vector<std::string> formats{"csv", "json"};
};

/// Names accepted in "suites".
const std::vector<std::string>& known_suites();

/// Parses and validates an experiment file's JSON text. Throws ConfigError
/// naming the offending block or key.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

}  // namespace masharp
