#include "masharp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "masharp/error.hpp"

namespace masharp {

void ProblemSpec::validate() const {
  if (!(lambda > 0.0) || !(lambda <= Lambda))
    throw SpecError("right-hand-side bounds must satisfy 0 < lambda <= Lambda");
  const int n = dim();
  if (s != 0.0 && !(s < n - 2))
    throw SpecError("degeneracy power must satisfy s < n - 2");
  if (!(gamma > 1.0 && gamma < 2.0)) throw SpecError("gamma must lie in (1, 2)");
  for (double d : delta_list)
    if (!(d > 0.0)) throw SpecError("delta-list entries must be positive");
  for (double h : h_list)
    if (!(h > 0.0)) throw SpecError("h-list entries must be positive");
  if (s > 0.0) {
    const double pivot = 2.0 / (n - s);
    if (!(0.0 < mu1 && mu1 < pivot && pivot < mu2 && mu2 < 1.0))
      throw SpecError("need 0 < mu1 < 2/(n-s) < mu2 < 1");
  }
}

void check_rhs_bounds(const ProblemSpec& spec, const Grid& grid) {
  const auto& domain = spec.domain;
  const double tol = 1e-12 * std::max(1.0, spec.Lambda);
  for (int node = 0; node < grid.node_count(); ++node) {
    const Point x = grid.coords(node);
    if (domain.depth(x) < -1e-10 * grid.spacing()) continue;
    const double v = spec.f(x);
    if (!std::isfinite(v) || v < spec.lambda - tol || v > spec.Lambda + tol) {
      std::ostringstream os;
      os << "f = " << v << " at (" << x[0] << ", " << x[1] << ", " << x[2]
         << ") violates the declared bounds [" << spec.lambda << ", " << spec.Lambda << "]";
      throw SpecError(os.str());
    }
  }
}

void SolverConfig::validate() const {
  if (stencil_width < 1 || stencil_width > 3) throw SpecError("stencil_width must be 1, 2 or 3");
  if (!(newton_tolerance > 0.0)) throw SpecError("newton_tolerance must be > 0");
  if (max_newton_iters < 1) throw SpecError("max_newton_iters must be >= 1");
  if (!(damping > 0.0 && damping < 1.0)) throw SpecError("damping must lie in (0, 1)");
  if (!(omega > 0.0 && omega <= 1.0)) throw SpecError("omega must lie in (0, 1]");
  if (max_outer_iters < 1) throw SpecError("max_outer_iters must be >= 1");
}

SolverConfig default_solver_config(int dim) {
  SolverConfig c;
  c.stencil_width = dim == 2 ? 2 : 1;
  return c;
}

double GridField::sup_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace masharp
