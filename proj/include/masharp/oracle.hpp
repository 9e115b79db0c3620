#pragma once

#include <vector>

#include "masharp/expression.hpp"
#include "masharp/geometry.hpp"

namespace masharp {

struct OracleOptions {
  /// Points where the discrete function is pinned to zero. Empty means:
  /// exits of the axis-parallel rays from every node, plus the domain
  /// vertices for boxes and polytopes.
  std::vector<Point> boundary_points;
  /// Cell area per node. Empty means: area of the node's Voronoi cell with
  /// respect to all nodes and boundary points, clipped to the domain.
  std::vector<double> cell_areas;
  double tolerance = 1e-10;  ///< stop when every mass defect is below this
  long max_lifts = 1000000;
};

struct OracleResult {
  std::vector<double> values;  ///< one per node
  std::vector<double> masses;  ///< prescribed subgradient measure per node
  std::vector<Point> boundary_points;
  long lifts = 0;
  int sweeps = 0;
  double max_defect = 0.0;
};

/// Area of the subgradient polygon {p : p.(x_j - x_i) <= u_j - u_i for all j}
/// of the piecewise-linear lower hull at point i. `points` and `values`
/// include the boundary points (with value 0). Zero when point i is not a
/// vertex of the lower hull.
double subgradient_area(const std::vector<Point>& points, const std::vector<double>& values, int i);

/// Discrete Aleksandrov solution on a planar point set: the convex function
/// vanishing at the boundary points whose subgradient measure at each node
/// equals f(node) times its cell area. Each node is lowered in turn (in a
/// Gauss-Seidel sweep) until its measure matches, starting from u = 0.
/// Throws SpecError for n != 2 or more than 200 nodes, OutsideDomainError
/// for nodes outside the domain and ConvergenceError when max_lifts is hit.
OracleResult oliker_prussner_oracle(const ConvexDomain& domain, const Expression& f,
                                    const std::vector<Point>& nodes,
                                    const OracleOptions& options = {});

}  // namespace masharp
