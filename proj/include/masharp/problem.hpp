#pragma once

#include <memory>
#include <vector>

#include "masharp/expression.hpp"
#include "masharp/geometry.hpp"

namespace masharp {

/// One instance of det D^2 u = f |u|^s, u = 0 on the boundary, together
/// with the parameters the estimate harness sweeps over.
struct ProblemSpec {
  ConvexDomain domain = ConvexDomain::ball({0, 0, 0}, 1.0, 2);
  Expression f = Expression::constant(1.0);
  double lambda = 1.0;  ///< declared lower bound of f
  double Lambda = 1.0;  ///< declared upper bound of f
  double s = 0.0;       ///< degeneracy power
  double gamma = 1.1;   ///< enters only through alpha = 2/(1+gamma) in 2D
  std::vector<double> delta_list;
  std::vector<double> h_list;
  std::vector<double> xn_list;
  double mu1 = 0.0;
  double mu2 = 0.0;

  int dim() const { return domain.dim(); }
  /// Throws SpecError on violated invariants (bounds, s < n-2, gamma and mu
  /// ranges).
  void validate() const;
};

/// Samples f on every grid node of the closed domain and throws SpecError
/// when a value leaves [lambda, Lambda].
void check_rhs_bounds(const ProblemSpec& spec, const Grid& grid);

struct SolverConfig {
  int stencil_width = 2;
  double newton_tolerance = 1e-8;
  int max_newton_iters = 200;
  double damping = 0.5;        ///< backtracking factor
  double omega = 0.5;          ///< fixed-point relaxation weight
  int max_outer_iters = 50;
  double eps_floor = -1.0;     ///< < 0 selects 1e-10 * diam^2

  void validate() const;
};

/// Stencil width 2 in 2D, 1 in 3D.
SolverConfig default_solver_config(int dim);

/// One value per grid node; exterior nodes hold the boundary value 0.
struct GridField {
  std::shared_ptr<const Grid> grid;
  std::vector<double> values;

  double sup_abs() const;
};

struct SolveReport {
  bool converged = false;
  int newton_iterations = 0;
  double residual = 0.0;
  int outer_iterations = 0;
  double wall_seconds = 0.0;
  double u_min = 0.0;
  double u_max = 0.0;
  /// Most negative centred second difference over all stencil directions.
  double min_second_difference = 0.0;
};

}  // namespace masharp
