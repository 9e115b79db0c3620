#pragma once

#include <array>
#include <memory>
#include <vector>

#include "masharp/geometry.hpp"
#include "masharp/problem.hpp"

namespace masharp {

/// Symmetric n x n matrix, row-major in a 3 x 3 array.
using SymMatrix = std::array<double, 9>;

/// Eigenvalues of the leading dim x dim block in ascending order (closed
/// form for 2 x 2, cyclic Jacobi for 3 x 3).
std::array<double, 3> symmetric_eigenvalues(const SymMatrix& m, int dim);
double determinant(const SymMatrix& m, int dim);

/// Centred-difference Hessians, gradients and derived quantities at the
/// nodes whose full stencil lies well inside the domain.
struct HessianField {
  std::shared_ptr<const Grid> grid;
  double eligibility_distance = 0.0;  ///< 2 h sqrt(n)
  std::vector<int> nodes;             ///< eligible nodes, increasing
  std::vector<int> slot;              ///< per grid node: position in nodes, or -1
  std::vector<SymMatrix> matrix;
  std::vector<Point> gradient;
  std::vector<double> spectral_norm;
  std::vector<double> det;
  std::vector<double> min_eigenvalue;

  int dim() const { return grid->dim(); }
  bool eligible(int node) const { return slot[node] >= 0; }
};

/// Throws ResolutionError when no node is eligible.
HessianField hessian_field(const GridField& u);

struct HadamardNode {
  int node = -1;
  double det = 0.0;
  double diag_product = 0.0;
  double f = 0.0;
};

struct HadamardReport {
  bool pass = false;
  double tolerance = 0.0;            ///< 1e-8 * max prod D_ii
  int checked = 0;
  int violations = 0;
  double worst_excess = 0.0;         ///< max(det - prod D_ii)
  HadamardNode worst;                ///< node attaining worst_excess
  double max_relative_residual = 0.0;  ///< max |det - f| / f over all eligible nodes
  HadamardNode worst_residual;
  /// Same residual restricted to nodes at least `residual_distance` from
  /// the boundary.
  double residual_distance = 0.0;
  double max_relative_residual_far = 0.0;
  double median_relative_residual_far = 0.0;
  int far_nodes = 0;
};

/// Checks det H <= prod_i H_ii + tol at every eligible node and measures
/// |det H - f| / f. `f_values` holds one value per grid node.
HadamardReport hadamard_report(const HessianField& H, const std::vector<double>& f_values,
                               double residual_distance);

/// One grid line through a box domain.
struct ProfileTable {
  int axis = 0;
  Point through{};
  std::vector<int> nodes;
  std::vector<double> x;     ///< coordinate along the axis
  std::vector<double> u;
  std::vector<double> du;    ///< centred first difference along the axis
  std::vector<double> d2u;   ///< centred second difference along the axis
  std::vector<double> dnn;   ///< D_nn from the Hessian field, NaN when ineligible
  /// D u(end) - D u(start) with centred differences.
  double slope_difference = 0.0;
  /// Trapezoid integral of d2u over the profile.
  double trapezoid_integral = 0.0;
  /// Convexity bound |u(end)| / (b - end) + |u(start)| / (start - a) on the
  /// slope difference, with (a, b) the box interval along the axis.
  double convexity_bound = 0.0;
  double sup_abs_u = 0.0;
};

/// Profile along `axis` through the grid line nearest `through`, restricted
/// to coordinates in [lo, hi]. Throws GeometryError for non-box domains.
ProfileTable directional_profile(const GridField& u, const HessianField& H, int axis,
                                 const Point& through, double lo, double hi);

}  // namespace masharp
