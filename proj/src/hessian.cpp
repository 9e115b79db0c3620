#include "masharp/hessian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "masharp/error.hpp"

namespace masharp {

std::array<double, 3> symmetric_eigenvalues(const SymMatrix& m, int dim) {
  if (dim == 2) {
    const double a = m[0], b = m[1], d = m[4];
    const double mean = 0.5 * (a + d);
    const double rad = std::hypot(0.5 * (a - d), b);
    return {mean - rad, mean + rad, 0.0};
  }
  // Cyclic Jacobi rotations on a copy.
  double a[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a[i][j] = m[3 * i + j];
  for (int sweep = 0; sweep < 50; ++sweep) {
    double off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    double scale = a[0][0] * a[0][0] + a[1][1] * a[1][1] + a[2][2] * a[2][2] + 2.0 * off;
    if (off <= 1e-24 * scale || off == 0.0) break;
    for (int p = 0; p < 2; ++p)
      for (int q = p + 1; q < 3; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
  }
  std::array<double, 3> ev{a[0][0], a[1][1], a[2][2]};
  std::sort(ev.begin(), ev.end());
  return ev;
}

double determinant(const SymMatrix& m, int dim) {
  if (dim == 2) return m[0] * m[4] - m[1] * m[3];
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

HessianField hessian_field(const GridField& u) {
  const Grid& g = *u.grid;
  const int n = g.dim();
  const double h = g.spacing();
  HessianField H;
  H.grid = u.grid;
  H.eligibility_distance = 2.0 * h * std::sqrt(static_cast<double>(n));
  H.slot.assign(g.node_count(), -1);
  const auto& dist = g.node_distance();
  for (int node : g.interior_nodes())
    if (dist[node] >= H.eligibility_distance) {
      H.slot[node] = static_cast<int>(H.nodes.size());
      H.nodes.push_back(node);
    }
  if (H.nodes.empty()) throw ResolutionError("no node has a full Hessian stencil inside the domain");

  const std::size_t m = H.nodes.size();
  H.matrix.resize(m);
  H.gradient.resize(m);
  H.spectral_norm.resize(m);
  H.det.resize(m);
  H.min_eigenvalue.resize(m);
  const double inv_h2 = 1.0 / (h * h);

#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < m; ++i) {
    const int node = H.nodes[i];
    const auto ijk = g.multi_index(node);
    auto at = [&](int a, int sa, int b, int sb) {
      auto q = ijk;
      q[a] += sa;
      q[b] += sb;
      return u.values[g.index(q)];
    };
    const double u0 = u.values[node];
    SymMatrix mat{};
    Point grad{};
    for (int a = 0; a < n; ++a) {
      const double up = at(a, 1, a, 0), um = at(a, -1, a, 0);
      mat[3 * a + a] = (up - 2.0 * u0 + um) * inv_h2;
      grad[a] = (up - um) / (2.0 * h);
      for (int b = a + 1; b < n; ++b) {
        const double cross = (at(a, 1, b, 1) - at(a, 1, b, -1) - at(a, -1, b, 1) + at(a, -1, b, -1)) *
                             (0.25 * inv_h2);
        mat[3 * a + b] = cross;
        mat[3 * b + a] = cross;
      }
    }
    const auto ev = symmetric_eigenvalues(mat, n);
    H.matrix[i] = mat;
    H.gradient[i] = grad;
    H.min_eigenvalue[i] = ev[0];
    H.spectral_norm[i] = std::max(std::abs(ev[0]), std::abs(ev[n - 1]));
    H.det[i] = determinant(mat, n);
  }
  return H;
}

HadamardReport hadamard_report(const HessianField& H, const std::vector<double>& f_values,
                               double residual_distance) {
  const int n = H.dim();
  HadamardReport rep;
  rep.residual_distance = residual_distance;
  std::vector<double> prod(H.nodes.size());
  double max_prod = 0.0;
  for (std::size_t i = 0; i < H.nodes.size(); ++i) {
    double p = 1.0;
    for (int a = 0; a < n; ++a) p *= H.matrix[i][3 * a + a];
    prod[i] = p;
    max_prod = std::max(max_prod, std::abs(p));
  }
  rep.tolerance = 1e-8 * max_prod;
  rep.worst_excess = -std::numeric_limits<double>::infinity();
  const auto& dist = H.grid->node_distance();
  std::vector<double> far;
  for (std::size_t i = 0; i < H.nodes.size(); ++i) {
    const int node = H.nodes[i];
    ++rep.checked;
    const double excess = H.det[i] - prod[i];
    const HadamardNode rec{node, H.det[i], prod[i], f_values[node]};
    if (excess > rep.worst_excess) {
      rep.worst_excess = excess;
      rep.worst = rec;
    }
    if (excess > rep.tolerance) ++rep.violations;
    const double rel = std::abs(H.det[i] - f_values[node]) / std::abs(f_values[node]);
    if (rel > rep.max_relative_residual) {
      rep.max_relative_residual = rel;
      rep.worst_residual = rec;
    }
    if (dist[node] >= residual_distance) {
      ++rep.far_nodes;
      rep.max_relative_residual_far = std::max(rep.max_relative_residual_far, rel);
      far.push_back(rel);
    }
  }
  if (!far.empty()) {
    auto mid = far.begin() + far.size() / 2;
    std::nth_element(far.begin(), mid, far.end());
    rep.median_relative_residual_far = *mid;
  }
  rep.pass = rep.violations == 0;
  return rep;
}

ProfileTable directional_profile(const GridField& u, const HessianField& H, int axis,
                                 const Point& through, double lo, double hi) {
  const Grid& g = *u.grid;
  const auto& domain = g.domain();
  if (domain.kind() != ConvexDomain::Kind::box)
    throw GeometryError("directional profiles need a box domain");
  const int n = g.dim();
  if (axis < 0 || axis >= n) throw GeometryError("profile axis out of range");
  const double h = g.spacing();

  std::array<int, 3> ijk{0, 0, 0};
  for (int a = 0; a < n; ++a)
    if (a != axis) ijk[a] = static_cast<int>(std::lround((through[a] - g.origin()[a]) / h));

  ProfileTable t;
  t.axis = axis;
  t.through = g.coords(ijk);
  const double eps = 1e-9 * h;
  for (int i = 1; i + 1 < g.counts()[axis]; ++i) {
    ijk[axis] = i;
    const double x = g.origin()[axis] + h * i;
    if (x < lo - eps || x > hi + eps) continue;
    const int node = g.index(ijk);
    if (!g.is_interior(node)) continue;
    auto nb = [&](int s) {
      auto q = ijk;
      q[axis] += s;
      return u.values[g.index(q)];
    };
    const double u0 = u.values[node];
    t.nodes.push_back(node);
    t.x.push_back(x);
    t.u.push_back(u0);
    t.du.push_back((nb(1) - nb(-1)) / (2.0 * h));
    t.d2u.push_back((nb(1) - 2.0 * u0 + nb(-1)) / (h * h));
    const int slot = H.slot[node];
    t.dnn.push_back(slot >= 0 ? H.matrix[slot][3 * (n - 1) + (n - 1)]
                              : std::numeric_limits<double>::quiet_NaN());
    t.sup_abs_u = std::max(t.sup_abs_u, std::abs(u0));
  }
  if (t.nodes.size() < 2) throw ResolutionError("profile has fewer than two interior nodes");
  t.slope_difference = t.du.back() - t.du.front();
  double integral = 0.0;
  for (std::size_t i = 0; i < t.d2u.size(); ++i) {
    const double w = (i == 0 || i + 1 == t.d2u.size()) ? 0.5 : 1.0;
    integral += w * h * t.d2u[i];
  }
  t.trapezoid_integral = integral;
  const auto [a, b] = domain.intervals()[axis];
  t.convexity_bound = std::abs(t.u.back()) / (b - t.x.back()) + std::abs(t.u.front()) / (t.x.front() - a);
  return t;
}

}  // namespace masharp
