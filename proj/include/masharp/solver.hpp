#pragma once

#include <array>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "masharp/geometry.hpp"
#include "masharp/problem.hpp"

namespace masharp {

/// Primitive lattice direction (first nonzero coordinate positive).
struct LatticeDirection {
  std::array<int, 3> step{};
  double length = 0.0;  ///< Euclidean length in lattice units
};

/// Admissible orthogonal bases of lattice directions with coordinates
/// bounded by the stencil width. Bases are sorted lexicographically, so the
/// first minimiser is the lexicographically smallest one.
struct StencilSet {
  int dim = 2;
  int width = 1;
  std::vector<LatticeDirection> directions;
  std::vector<std::array<int, 3>> bases;  ///< indices into directions
};

StencilSet make_stencil(int dim, int width);

/// End of a stencil arm: a grid unknown, or the boundary (value 0).
struct Arm {
  int unknown = -1;     ///< -1 when the arm is cut by the boundary
  double length = 0.0;  ///< physical length
};

/// Unequal-arm three-point second difference along a unit direction.
inline double second_difference(double u0, double up, double lp, double um, double lm) {
  return 2.0 / (lp + lm) * ((up - u0) / lp + (um - u0) / lm);
}

/// Monotone wide-stencil discretisation of det D^2 u:
///   MA_h[u](x) = min_b prod_i max(D_{v_i} u, 0) + P * sum_i min(D_{v_i} u, 0)
/// with arms shortened to the boundary where they leave the domain.
class MaOperator {
 public:
  MaOperator(std::shared_ptr<const Grid> grid, int stencil_width, double penalty);

  struct Evaluation {
    double value = 0.0;
    int basis = 0;
    std::array<double, 3> second_diff{};
  };

  const Grid& grid() const { return *grid_; }
  std::shared_ptr<const Grid> grid_ptr() const { return grid_; }
  const StencilSet& stencil() const { return stencil_; }
  double penalty() const { return penalty_; }

  /// Arm of unknown k along +direction d (sign = +1) or -direction d.
  const Arm& arm(int k, int d, int sign) const {
    return arms_[(static_cast<std::size_t>(k) * stencil_.directions.size() + d) * 2 + (sign > 0 ? 0 : 1)];
  }
  double arm_value(const std::vector<double>& unknowns, const Arm& a) const {
    return a.unknown < 0 ? 0.0 : unknowns[a.unknown];
  }
  /// Second difference of the unknown vector at unknown k along direction d.
  double directional(const std::vector<double>& unknowns, int k, int d) const;
  Evaluation evaluate(const std::vector<double>& unknowns, int k) const;

  /// Most negative second difference over all unknowns and stencil directions.
  double min_second_difference(const std::vector<double>& unknowns) const;

 private:
  std::shared_ptr<const Grid> grid_;
  StencilSet stencil_;
  double penalty_;
  std::vector<Arm> arms_;
};

/// MA_h[u] at one interior node, computing the stencil geometry for that
/// node only. Throws GeometryError when `node` is not interior.
double discrete_ma_operator(const GridField& u, int node, int stencil_width, double penalty);

/// Values of a grid field at the interior nodes, in unknown order.
std::vector<double> to_unknowns(const GridField& u);
GridField from_unknowns(std::shared_ptr<const Grid> grid, const std::vector<double>& unknowns);

/// Convex nonpositive start Lambda^{1/n} (|x - x_c|^2 - R_c^2) / 2 on the
/// bounding ball of the domain.
GridField initial_guess(std::shared_ptr<const Grid> grid, double Lambda);

/// Multilinear interpolation of a field onto another grid of the same
/// domain; exterior nodes of the target get 0.
GridField prolong(const GridField& coarse, std::shared_ptr<const Grid> fine);

/// Source term g(u) at an unknown and its derivative in u.
using SourceTerm = std::function<void(int unknown, double u, double& g, double& dg)>;

/// Damped semismooth Newton on MA_h[u] - g(u) = 0. The argmin basis at each
/// node is frozen per iteration; the step is halved (by config.damping)
/// until the residual sup-norm decreases. `u` holds the start on entry and
/// the last accepted iterate on exit.
SolveReport newton_solve(const MaOperator& op, const SourceTerm& source, std::vector<double>& u,
                         const SolverConfig& config);

/// Solves det D^2 u = f, u = 0 on the boundary. Starts from `initial` when
/// given, else from initial_guess(). Throws SpecError when f violates its
/// declared bounds.
std::pair<GridField, SolveReport> solve_dirichlet(const ProblemSpec& spec,
                                                  std::shared_ptr<const Grid> grid,
                                                  const SolverConfig& config,
                                                  const GridField* initial = nullptr);

/// Solves det D^2 u = f |u|^s by relaxed fixed-point iteration on the
/// right-hand side f max(|u|, eps_floor)^s. s = 0 reduces to
/// solve_dirichlet. Throws ConvergenceError on outer divergence or collapse
/// to the trivial branch.
std::pair<GridField, SolveReport> solve_degenerate(const ProblemSpec& spec,
                                                   std::shared_ptr<const Grid> grid,
                                                   const SolverConfig& config,
                                                   const GridField* initial = nullptr);

/// Direct Newton on the coupled system MA_h[u] = f max(|u|, eps_floor)^s,
/// started from the s = 0 solution. Independent route used to cross-check
/// solve_degenerate.
std::pair<GridField, SolveReport> solve_degenerate_coupled(const ProblemSpec& spec,
                                                           std::shared_ptr<const Grid> grid,
                                                           const SolverConfig& config);

/// Effective floor for |u| in degenerate runs.
double effective_eps_floor(const ProblemSpec& spec, const SolverConfig& config);

}  // namespace masharp
