#include "masharp/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Sparse>
#ifdef MASHARP_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#else
#include <Eigen/SparseLU>
#endif

#include "masharp/error.hpp"

namespace masharp {

StencilSet make_stencil(int dim, int width) {
  if (dim != 2 && dim != 3) throw SpecError("stencil dimension must be 2 or 3");
  if (width < 1) throw SpecError("stencil width must be >= 1");
  StencilSet set;
  set.dim = dim;
  set.width = width;
  const int zmax = dim == 3 ? width : 0;
  for (int a = -width; a <= width; ++a)
    for (int b = -width; b <= width; ++b)
      for (int c = -zmax; c <= zmax; ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        if (std::gcd(std::gcd(std::abs(a), std::abs(b)), std::abs(c)) != 1) continue;
        const int first = a != 0 ? a : (b != 0 ? b : c);
        if (first < 0) continue;
        LatticeDirection d;
        d.step = {a, b, c};
        d.length = std::sqrt(static_cast<double>(a * a + b * b + c * c));
        set.directions.push_back(d);
      }
  std::sort(set.directions.begin(), set.directions.end(),
            [](const LatticeDirection& x, const LatticeDirection& y) { return x.step < y.step; });

  const int m = static_cast<int>(set.directions.size());
  auto orth = [&](int i, int j) {
    const auto& p = set.directions[i].step;
    const auto& q = set.directions[j].step;
    return p[0] * q[0] + p[1] * q[1] + p[2] * q[2] == 0;
  };
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      if (!orth(i, j)) continue;
      if (dim == 2) {
        set.bases.push_back({i, j, -1});
        continue;
      }
      for (int k = j + 1; k < m; ++k)
        if (orth(i, k) && orth(j, k)) set.bases.push_back({i, j, k});
    }

  // Keep only directions that belong to some basis, preserving order.
  std::vector<int> remap(m, -1);
  std::vector<LatticeDirection> kept;
  for (const auto& b : set.bases)
    for (int i = 0; i < dim; ++i) remap[b[i]] = 0;
  for (int i = 0; i < m; ++i)
    if (remap[i] == 0) {
      remap[i] = static_cast<int>(kept.size());
      kept.push_back(set.directions[i]);
    }
  for (auto& b : set.bases)
    for (int i = 0; i < dim; ++i) b[i] = remap[b[i]];
  set.directions = std::move(kept);
  return set;
}

namespace {

constexpr std::size_t kMaxDirections = 256;

Arm make_arm(const Grid& grid, const std::array<int, 3>& ijk, const LatticeDirection& d, int sign) {
  const double h = grid.spacing();
  std::array<int, 3> end = ijk;
  for (int a = 0; a < 3; ++a) end[a] += sign * d.step[a];
  const int nb = grid.index(end);
  if (nb >= 0 && grid.is_interior(nb)) return {grid.unknown(nb), d.length * h};
  Point dir{};
  for (int a = 0; a < grid.dim(); ++a) dir[a] = sign * d.step[a] * h;
  const double t = std::min(grid.domain().ray_exit(grid.coords(ijk), dir), 1.0);
  if (!(t > 0.0)) throw GeometryError("stencil arm leaves the domain without a cut distance");
  return {-1, t * d.length * h};
}

// Product/penalty value of one basis given per-direction second differences.
double basis_value(const std::array<double, 3>& diffs, int dim, double penalty) {
  double prod = 1.0;
  double neg = 0.0;
  for (int i = 0; i < dim; ++i) {
    prod *= std::max(diffs[i], 0.0);
    neg += std::min(diffs[i], 0.0);
  }
  return prod + penalty * neg;
}

}  // namespace

MaOperator::MaOperator(std::shared_ptr<const Grid> grid, int stencil_width, double penalty)
    : grid_(std::move(grid)), stencil_(make_stencil(grid_->dim(), stencil_width)), penalty_(penalty) {
  const auto& nodes = grid_->interior_nodes();
  const std::size_t nd = stencil_.directions.size();
  if (nd > kMaxDirections) throw SpecError("stencil has too many directions");
  arms_.resize(nodes.size() * nd * 2);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto ijk = grid_->multi_index(nodes[k]);
    for (std::size_t d = 0; d < nd; ++d) {
      arms_[(k * nd + d) * 2] = make_arm(*grid_, ijk, stencil_.directions[d], +1);
      arms_[(k * nd + d) * 2 + 1] = make_arm(*grid_, ijk, stencil_.directions[d], -1);
    }
  }
}

double MaOperator::directional(const std::vector<double>& u, int k, int d) const {
  const Arm& p = arm(k, d, +1);
  const Arm& m = arm(k, d, -1);
  return second_difference(u[k], arm_value(u, p), p.length, arm_value(u, m), m.length);
}

MaOperator::Evaluation MaOperator::evaluate(const std::vector<double>& u, int k) const {
  const int dim = stencil_.dim;
  std::array<double, kMaxDirections> diff{};
  const int nd = static_cast<int>(stencil_.directions.size());
  for (int d = 0; d < nd; ++d) diff[d] = directional(u, k, d);
  Evaluation best;
  best.value = std::numeric_limits<double>::infinity();
  for (int b = 0; b < static_cast<int>(stencil_.bases.size()); ++b) {
    std::array<double, 3> vals{};
    for (int i = 0; i < dim; ++i) vals[i] = diff[stencil_.bases[b][i]];
    const double v = basis_value(vals, dim, penalty_);
    if (v < best.value) {
      best.value = v;
      best.basis = b;
      best.second_diff = vals;
    }
  }
  return best;
}

double MaOperator::min_second_difference(const std::vector<double>& u) const {
  double m = std::numeric_limits<double>::infinity();
  const int nd = static_cast<int>(stencil_.directions.size());
  for (int k = 0; k < grid_->unknown_count(); ++k)
    for (int d = 0; d < nd; ++d) m = std::min(m, directional(u, k, d));
  return m;
}

double discrete_ma_operator(const GridField& u, int node, int stencil_width, double penalty) {
  const Grid& grid = *u.grid;
  if (node < 0 || node >= grid.node_count() || !grid.is_interior(node))
    throw GeometryError("operator requested at a non-interior node");
  const StencilSet st = make_stencil(grid.dim(), stencil_width);
  const auto ijk = grid.multi_index(node);
  std::vector<double> diff;
  for (const auto& d : st.directions) {
    const Arm p = make_arm(grid, ijk, d, +1);
    const Arm m = make_arm(grid, ijk, d, -1);
    auto value = [&](const Arm& a, int sign) {
      if (a.unknown < 0) return 0.0;
      std::array<int, 3> end = ijk;
      for (int c = 0; c < 3; ++c) end[c] += sign * d.step[c];
      return u.values[grid.index(end)];
    };
    diff.push_back(second_difference(u.values[node], value(p, +1), p.length, value(m, -1), m.length));
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : st.bases) {
    std::array<double, 3> vals{};
    for (int i = 0; i < grid.dim(); ++i) vals[i] = diff[b[i]];
    best = std::min(best, basis_value(vals, grid.dim(), penalty));
  }
  return best;
}

std::vector<double> to_unknowns(const GridField& u) {
  const auto& nodes = u.grid->interior_nodes();
  std::vector<double> out(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) out[k] = u.values[nodes[k]];
  return out;
}

GridField from_unknowns(std::shared_ptr<const Grid> grid, const std::vector<double>& unknowns) {
  GridField f;
  f.values.assign(grid->node_count(), 0.0);
  const auto& nodes = grid->interior_nodes();
  for (std::size_t k = 0; k < nodes.size(); ++k) f.values[nodes[k]] = unknowns[k];
  f.grid = std::move(grid);
  return f;
}

GridField initial_guess(std::shared_ptr<const Grid> grid, double Lambda) {
  const auto [c, r] = grid->domain().bounding_ball();
  const double scale = std::pow(Lambda, 1.0 / grid->dim());
  GridField f;
  f.values.assign(grid->node_count(), 0.0);
  for (int node : grid->interior_nodes()) {
    const Point x = grid->coords(node) - c;
    f.values[node] = scale * (dot(x, x) - r * r) / 2.0;
  }
  f.grid = std::move(grid);
  return f;
}

GridField prolong(const GridField& coarse, std::shared_ptr<const Grid> fine) {
  const Grid& cg = *coarse.grid;
  const int dim = cg.dim();
  GridField out;
  out.values.assign(fine->node_count(), 0.0);
  for (int node : fine->interior_nodes()) {
    const Point x = fine->coords(node);
    std::array<int, 3> base{0, 0, 0};
    std::array<double, 3> w{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      const double xi = (x[a] - cg.origin()[a]) / cg.spacing();
      int i0 = static_cast<int>(std::floor(xi));
      i0 = std::clamp(i0, 0, cg.counts()[a] - 2);
      base[a] = i0;
      w[a] = std::clamp(xi - i0, 0.0, 1.0);
    }
    double v = 0.0;
    for (int corner = 0; corner < (1 << dim); ++corner) {
      double weight = 1.0;
      std::array<int, 3> ijk = base;
      for (int a = 0; a < dim; ++a) {
        const int bit = corner >> a & 1;
        ijk[a] += bit;
        weight *= bit ? w[a] : 1.0 - w[a];
      }
      if (weight == 0.0) continue;
      v += weight * coarse.values[cg.index(ijk)];
    }
    out.values[node] = v;
  }
  out.grid = std::move(fine);
  return out;
}

namespace {

double residual(const MaOperator& op, const SourceTerm& source, const std::vector<double>& u,
                std::vector<double>& r) {
  const int n = static_cast<int>(u.size());
  r.resize(n);
  double sup = 0.0;
#pragma omp parallel for reduction(max : sup) schedule(static)
  for (int k = 0; k < n; ++k) {
    double g = 0.0, dg = 0.0;
    source(k, u[k], g, dg);
    r[k] = op.evaluate(u, k).value - g;
    sup = std::max(sup, std::isfinite(r[k]) ? std::abs(r[k]) : std::numeric_limits<double>::infinity());
  }
  return sup;
}

Eigen::SparseMatrix<double> jacobian(const MaOperator& op, const SourceTerm& source,
                                     const std::vector<double>& u) {
  const int n = static_cast<int>(u.size());
  const int dim = op.stencil().dim;
  const int per_row = 1 + 2 * dim;
  std::vector<Eigen::Triplet<double>> trip(static_cast<std::size_t>(n) * per_row);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n; ++k) {
    const auto ev = op.evaluate(u, k);
    const auto& basis = op.stencil().bases[ev.basis];
    double g = 0.0, dg = 0.0;
    source(k, u[k], g, dg);
    double diag = -dg;
    std::size_t slot = static_cast<std::size_t>(k) * per_row;
    for (int i = 0; i < dim; ++i) {
      double c = op.penalty();
      if (ev.second_diff[i] > 0.0) {
        c = 1.0;
        for (int j = 0; j < dim; ++j)
          if (j != i) c *= std::max(ev.second_diff[j], 0.0);
      }
      const Arm& p = op.arm(k, basis[i], +1);
      const Arm& m = op.arm(k, basis[i], -1);
      const double ap = 2.0 / ((p.length + m.length) * p.length);
      const double am = 2.0 / ((p.length + m.length) * m.length);
      diag -= c * (ap + am);
      // Boundary arms contribute only to the diagonal; keep a zero entry so
      // every row has the same slot count.
      trip[slot++] = Eigen::Triplet<double>(k, p.unknown < 0 ? k : p.unknown, p.unknown < 0 ? 0.0 : c * ap);
      trip[slot++] = Eigen::Triplet<double>(k, m.unknown < 0 ? k : m.unknown, m.unknown < 0 ? 0.0 : c * am);
    }
    trip[slot] = Eigen::Triplet<double>(k, k, diag);
  }
  Eigen::SparseMatrix<double> J(n, n);
  J.setFromTriplets(trip.begin(), trip.end());
  J.makeCompressed();
  return J;
}

bool direct_solve(const Eigen::SparseMatrix<double>& J, const std::vector<double>& rhs,
                  std::vector<double>& x) {
  const int n = static_cast<int>(rhs.size());
  Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n);
#ifdef MASHARP_HAVE_UMFPACK
  Eigen::UmfPackLU<Eigen::SparseMatrix<double>> lu;
#else
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
#endif
  lu.compute(J);
  if (lu.info() != Eigen::Success) return false;
  Eigen::VectorXd sol = lu.solve(b);
  if (lu.info() != Eigen::Success || !sol.allFinite()) return false;
  x.assign(sol.data(), sol.data() + n);
  return true;
}

// 3D Jacobians fill in badly under direct factorisation; the 2D ones do not.
bool linear_solve(const Eigen::SparseMatrix<double>& J, const std::vector<double>& rhs,
                  std::vector<double>& x, int dim) {
  if (dim == 2) return direct_solve(J, rhs, x);
  const int n = static_cast<int>(rhs.size());
  Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n);
  Eigen::BiCGSTAB<Eigen::SparseMatrix<double, Eigen::RowMajor>, Eigen::IncompleteLUT<double>> it;
  it.preconditioner().setDroptol(1e-4);
  it.preconditioner().setFillfactor(4);
  it.setTolerance(1e-10);
  it.setMaxIterations(2000);
  Eigen::SparseMatrix<double, Eigen::RowMajor> Jr = J;
  it.compute(Jr);
  if (it.info() == Eigen::Success) {
    Eigen::VectorXd sol = it.solve(b);
    if (it.info() == Eigen::Success && sol.allFinite()) {
      x.assign(sol.data(), sol.data() + n);
      return true;
    }
  }
  return direct_solve(J, rhs, x);
}

void finish_report(const MaOperator& op, const std::vector<double>& u, SolveReport& rep) {
  rep.u_min = 0.0;
  rep.u_max = 0.0;
  if (!u.empty()) {
    rep.u_min = std::min(0.0, *std::min_element(u.begin(), u.end()));
    rep.u_max = std::max(0.0, *std::max_element(u.begin(), u.end()));
  }
  rep.min_second_difference = op.min_second_difference(u);
}

}  // namespace

SolveReport newton_solve(const MaOperator& op, const SourceTerm& source, std::vector<double>& u,
                         const SolverConfig& config) {
  SolveReport rep;
  std::vector<double> r, trial_r, step(u.size()), rhs(u.size()), trial(u.size());
  double res = residual(op, source, u, r);
  for (int it = 0; it < config.max_newton_iters; ++it) {
    if (res <= config.newton_tolerance) {
      rep.converged = true;
      break;
    }
    const auto J = jacobian(op, source, u);
    for (std::size_t k = 0; k < r.size(); ++k) rhs[k] = -r[k];
    if (!linear_solve(J, rhs, step, op.stencil().dim)) break;
    ++rep.newton_iterations;

    double t = 1.0;
    bool accepted = false;
    while (t > 1e-10) {
      for (std::size_t k = 0; k < u.size(); ++k) trial[k] = u[k] + t * step[k];
      const double tr = residual(op, source, trial, trial_r);
      if (tr < (1.0 - 1e-4 * t) * res || tr <= config.newton_tolerance) {
        u.swap(trial);
        r.swap(trial_r);
        res = tr;
        accepted = true;
        break;
      }
      t *= config.damping;
    }
    if (!accepted) break;
  }
  if (res <= config.newton_tolerance) rep.converged = true;
  rep.residual = res;
  return rep;
}

namespace {

std::vector<double> rhs_values(const ProblemSpec& spec, const Grid& grid) {
  std::vector<double> out;
  out.reserve(grid.interior_nodes().size());
  for (int node : grid.interior_nodes()) out.push_back(spec.f(grid.coords(node)));
  return out;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::pair<GridField, SolveReport> solve_dirichlet(const ProblemSpec& spec,
                                                  std::shared_ptr<const Grid> grid,
                                                  const SolverConfig& config,
                                                  const GridField* initial) {
  const auto t0 = std::chrono::steady_clock::now();
  spec.validate();
  config.validate();
  check_rhs_bounds(spec, *grid);
  const MaOperator op(grid, config.stencil_width, spec.Lambda + 1.0);
  const std::vector<double> f = rhs_values(spec, *grid);
  std::vector<double> u = to_unknowns(initial ? *initial : initial_guess(grid, spec.Lambda));
  const SourceTerm source = [&f](int k, double, double& g, double& dg) {
    g = f[k];
    dg = 0.0;
  };
  SolveReport rep = newton_solve(op, source, u, config);
  finish_report(op, u, rep);
  rep.wall_seconds = elapsed(t0);
  return {from_unknowns(grid, u), rep};
}

double effective_eps_floor(const ProblemSpec& spec, const SolverConfig& config) {
  if (config.eps_floor > 0.0) return config.eps_floor;
  const double d = spec.domain.diameter();
  return 1e-10 * d * d;
}

std::pair<GridField, SolveReport> solve_degenerate(const ProblemSpec& spec,
                                                   std::shared_ptr<const Grid> grid,
                                                   const SolverConfig& config,
                                                   const GridField* initial) {
  const auto t0 = std::chrono::steady_clock::now();
  auto [first, first_rep] = solve_dirichlet(spec, grid, config, initial);
  if (spec.s == 0.0 || !first_rep.converged) return {first, first_rep};

  const double eps = effective_eps_floor(spec, config);
  const MaOperator op(grid, config.stencil_width, spec.Lambda + 1.0);
  const std::vector<double> f = rhs_values(spec, *grid);
  std::vector<double> u = to_unknowns(first);
  const double sup0 = first.sup_abs();
  const double s = spec.s;

  SolveReport rep;
  rep.newton_iterations = first_rep.newton_iterations;
  std::vector<double> rhs(u.size()), v;
  for (int outer = 1; outer <= config.max_outer_iters; ++outer) {
    for (std::size_t k = 0; k < u.size(); ++k) rhs[k] = f[k] * std::pow(std::max(std::abs(u[k]), eps), s);
    const SourceTerm source = [&rhs](int k, double, double& g, double& dg) {
      g = rhs[k];
      dg = 0.0;
    };
    v = u;
    const SolveReport inner = newton_solve(op, source, v, config);
    rep.newton_iterations += inner.newton_iterations;
    rep.outer_iterations = outer;
    rep.residual = inner.residual;
    if (!inner.converged) {
      rep.converged = false;
      finish_report(op, u, rep);
      rep.wall_seconds = elapsed(t0);
      return {from_unknowns(grid, u), rep};
    }
    double diff = 0.0, sup = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
      const double next = (1.0 - config.omega) * u[k] + config.omega * v[k];
      diff = std::max(diff, std::abs(next - u[k]));
      sup = std::max(sup, std::abs(next));
      u[k] = next;
    }
    if (sup > 10.0 * sup0) throw ConvergenceError("degenerate fixed-point iteration diverges");
    if (sup < 10.0 * eps) throw ConvergenceError("degenerate iteration collapsed to the zero solution");
    if (diff <= 1e-6 * sup0) {
      rep.converged = true;
      break;
    }
  }
  finish_report(op, u, rep);
  rep.wall_seconds = elapsed(t0);
  return {from_unknowns(grid, u), rep};
}

std::pair<GridField, SolveReport> solve_degenerate_coupled(const ProblemSpec& spec,
                                                           std::shared_ptr<const Grid> grid,
                                                           const SolverConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  auto [first, first_rep] = solve_dirichlet(spec, grid, config);
  if (spec.s == 0.0 || !first_rep.converged) return {first, first_rep};
  const double eps = effective_eps_floor(spec, config);
  const MaOperator op(grid, config.stencil_width, spec.Lambda + 1.0);
  const std::vector<double> f = rhs_values(spec, *grid);
  const double s = spec.s;
  const SourceTerm source = [&](int k, double u, double& g, double& dg) {
    const double a = std::abs(u);
    if (a > eps) {
      g = f[k] * std::pow(a, s);
      dg = f[k] * s * std::pow(a, s - 1.0) * (u < 0.0 ? -1.0 : 1.0);
    } else {
      g = f[k] * std::pow(eps, s);
      dg = 0.0;
    }
  };
  std::vector<double> u = to_unknowns(first);
  SolveReport rep = newton_solve(op, source, u, config);
  rep.newton_iterations += first_rep.newton_iterations;
  finish_report(op, u, rep);
  rep.wall_seconds = elapsed(t0);
  return {from_unknowns(grid, u), rep};
}

}  // namespace masharp
