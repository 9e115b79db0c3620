#include "masharp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "masharp/error.hpp"

namespace masharp {

double norm(const Point& a) { return std::sqrt(dot(a, a)); }
Point operator+(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Point operator-(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Point operator*(double s, const Point& a) { return {s * a[0], s * a[1], s * a[2]}; }

namespace {

constexpr double kFeasTol = 1e-10;

void check_dim(int dim) {
  if (dim != 2 && dim != 3) throw GeometryError("dimension must be 2 or 3");
}

// Solves the dim x dim system rows * x = rhs; returns false when singular.
bool solve_small(const std::vector<Point>& rows, const std::vector<double>& rhs, int dim,
                 Point& x) {
  Eigen::MatrixXd a(dim, dim);
  Eigen::VectorXd b(dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) a(r, c) = rows[r][c];
    b(r) = rhs[r];
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(1e-12);
  if (lu.rank() < dim) return false;
  Eigen::VectorXd sol = lu.solve(b);
  x = {0, 0, 0};
  for (int c = 0; c < dim; ++c) x[c] = sol(c);
  return true;
}

// Calls fn on every k-subset of {0..m-1} given as index vector.
template <typename Fn>
void for_each_subset(int m, int k, Fn&& fn) {
  if (k > m) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == m - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

Point cross(const Point& a, const Point& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// True when the recession cone {d : N d <= 0} is {0}.
bool recession_cone_trivial(const std::vector<HalfSpace>& hs, int dim) {
  Eigen::MatrixXd n(hs.size(), dim);
  for (std::size_t i = 0; i < hs.size(); ++i)
    for (int c = 0; c < dim; ++c) n(i, c) = hs[i].normal[c];
  Eigen::FullPivLU<Eigen::MatrixXd> lu(n);
  lu.setThreshold(1e-12);
  if (lu.rank() < dim) return false;  // contains a line

  auto is_recession = [&](const Point& d) {
    double len = norm(d);
    if (len < 1e-12) return false;
    for (const auto& h : hs)
      if (dot(h.normal, d) / len > 1e-12) return false;
    return true;
  };
  // Extreme rays of a pointed cone have dim-1 independent active constraints.
  bool found = false;
  for_each_subset(static_cast<int>(hs.size()), dim - 1, [&](const std::vector<int>& idx) {
    if (found) return;
    Point d{};
    if (dim == 2) {
      const Point& a = hs[idx[0]].normal;
      d = {-a[1], a[0], 0.0};
    } else {
      d = cross(hs[idx[0]].normal, hs[idx[1]].normal);
    }
    if (is_recession(d) || is_recession(-1.0 * d)) found = true;
  });
  return !found;
}

}  // namespace

ConvexDomain ConvexDomain::box(const std::vector<std::pair<double, double>>& intervals) {
  check_dim(static_cast<int>(intervals.size()));
  ConvexDomain d;
  d.kind_ = Kind::box;
  d.dim_ = static_cast<int>(intervals.size());
  for (const auto& [a, b] : intervals) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
      throw GeometryError("box interval must satisfy a < b");
  }
  d.intervals_ = intervals;
  const int corners = 1 << d.dim_;
  for (int mask = 0; mask < corners; ++mask) {
    Point v{};
    for (int i = 0; i < d.dim_; ++i) v[i] = (mask >> i & 1) ? intervals[i].second : intervals[i].first;
    d.vertices_.push_back(v);
  }
  return d;
}

ConvexDomain ConvexDomain::ball(const Point& center, double radius, int dim) {
  check_dim(dim);
  if (!(radius > 0.0) || !std::isfinite(radius)) throw GeometryError("ball radius must be > 0");
  ConvexDomain d;
  d.kind_ = Kind::ball;
  d.dim_ = dim;
  d.center_ = center;
  for (int i = dim; i < 3; ++i) d.center_[i] = 0.0;
  d.radius_ = radius;
  return d;
}

ConvexDomain ConvexDomain::polytope(const std::vector<HalfSpace>& halfspaces, int dim) {
  check_dim(dim);
  if (static_cast<int>(halfspaces.size()) < dim + 1)
    throw UnboundedDomainError("polytope needs at least n+1 half-spaces");
  ConvexDomain d;
  d.kind_ = Kind::polytope;
  d.dim_ = dim;
  for (auto h : halfspaces) {
    for (int i = dim; i < 3; ++i) h.normal[i] = 0.0;
    if (std::abs(norm(h.normal) - 1.0) > 1e-12)
      throw GeometryError("polytope normals must be unit vectors");
    d.halfspaces_.push_back(h);
  }
  if (!recession_cone_trivial(d.halfspaces_, dim))
    throw UnboundedDomainError("polytope normals do not positively span the space");

  // Chebyshev centre by enumerating basic solutions of
  // max r  s.t.  n_i . x + r <= b_i.
  const int m = static_cast<int>(d.halfspaces_.size());
  double best_r = -std::numeric_limits<double>::infinity();
  for_each_subset(m, dim + 1, [&](const std::vector<int>& idx) {
    Eigen::MatrixXd a(dim + 1, dim + 1);
    Eigen::VectorXd b(dim + 1);
    for (int r = 0; r <= dim; ++r) {
      for (int c = 0; c < dim; ++c) a(r, c) = d.halfspaces_[idx[r]].normal[c];
      a(r, dim) = 1.0;
      b(r) = d.halfspaces_[idx[r]].offset;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    lu.setThreshold(1e-12);
    if (lu.rank() < dim + 1) return;
    Eigen::VectorXd s = lu.solve(b);
    Point x{};
    for (int c = 0; c < dim; ++c) x[c] = s(c);
    const double r = s(dim);
    for (const auto& h : d.halfspaces_)
      if (dot(h.normal, x) + r > h.offset + kFeasTol) return;
    best_r = std::max(best_r, r);
  });
  if (!(best_r > 1e-12)) throw GeometryError("polytope has empty interior");
  d.compute_polytope_vertices();
  return d;
}

ConvexDomain ConvexDomain::box_as_polytope(const std::vector<std::pair<double, double>>& intervals) {
  const int dim = static_cast<int>(intervals.size());
  check_dim(dim);
  std::vector<HalfSpace> hs;
  for (int i = 0; i < dim; ++i) {
    HalfSpace lo, hi;
    lo.normal[i] = -1.0;
    lo.offset = -intervals[i].first;
    hi.normal[i] = 1.0;
    hi.offset = intervals[i].second;
    hs.push_back(lo);
    hs.push_back(hi);
  }
  return polytope(hs, dim);
}

void ConvexDomain::compute_polytope_vertices() {
  const int m = static_cast<int>(halfspaces_.size());
  for_each_subset(m, dim_, [&](const std::vector<int>& idx) {
    std::vector<Point> rows;
    std::vector<double> rhs;
    for (int i : idx) {
      rows.push_back(halfspaces_[i].normal);
      rhs.push_back(halfspaces_[i].offset);
    }
    Point x{};
    if (!solve_small(rows, rhs, dim_, x)) return;
    for (const auto& h : halfspaces_)
      if (dot(h.normal, x) > h.offset + kFeasTol) return;
    for (const auto& v : vertices_)
      if (norm(v - x) < 1e-9) return;
    vertices_.push_back(x);
  });
  if (vertices_.empty()) throw UnboundedDomainError("polytope has no vertices");
}

double ConvexDomain::depth(const Point& x) const {
  switch (kind_) {
    case Kind::box: {
      double d = std::numeric_limits<double>::infinity();
      for (int i = 0; i < dim_; ++i)
        d = std::min({d, x[i] - intervals_[i].first, intervals_[i].second - x[i]});
      return d;
    }
    case Kind::ball: {
      Point r = x - center_;
      for (int i = dim_; i < 3; ++i) r[i] = 0.0;
      return radius_ - norm(r);
    }
    case Kind::polytope: {
      double d = std::numeric_limits<double>::infinity();
      for (const auto& h : halfspaces_) d = std::min(d, h.offset - dot(h.normal, x));
      return d;
    }
  }
  return 0.0;
}

double ConvexDomain::dist_to_boundary(const Point& x, double tolerance) const {
  const double d = depth(x);
  if (d < -tolerance) {
    std::ostringstream os;
    os << "point lies outside the domain by " << -d;
    throw OutsideDomainError(os.str(), -d);
  }
  return std::max(d, 0.0);
}

double ConvexDomain::diameter() const {
  switch (kind_) {
    case Kind::box: {
      double s = 0.0;
      for (const auto& [a, b] : intervals_) s += (b - a) * (b - a);
      return std::sqrt(s);
    }
    case Kind::ball:
      return 2.0 * radius_;
    case Kind::polytope: {
      double best = 0.0;
      for (std::size_t i = 0; i < vertices_.size(); ++i)
        for (std::size_t j = i + 1; j < vertices_.size(); ++j)
          best = std::max(best, norm(vertices_[i] - vertices_[j]));
      return best;
    }
  }
  return 0.0;
}

double ConvexDomain::volume() const {
  switch (kind_) {
    case Kind::box: {
      double v = 1.0;
      for (const auto& [a, b] : intervals_) v *= b - a;
      return v;
    }
    case Kind::ball:
      return dim_ == 2 ? std::numbers::pi * radius_ * radius_
                       : 4.0 / 3.0 * std::numbers::pi * radius_ * radius_ * radius_;
    case Kind::polytope: {
      // Cone decomposition from the vertex centroid: sum over facets of
      // facet_measure * height / n.
      Point c{};
      for (const auto& v : vertices_) c = c + v;
      c = (1.0 / static_cast<double>(vertices_.size())) * c;
      double vol = 0.0;
      for (const auto& h : halfspaces_) {
        std::vector<Point> on;
        for (const auto& v : vertices_)
          if (std::abs(dot(h.normal, v) - h.offset) < 1e-9) on.push_back(v);
        if (static_cast<int>(on.size()) < dim_) continue;
        double facet = 0.0;
        if (dim_ == 2) {
          double far = 0.0;
          for (std::size_t i = 0; i < on.size(); ++i)
            for (std::size_t j = i + 1; j < on.size(); ++j) far = std::max(far, norm(on[i] - on[j]));
          facet = far;
        } else {
          Point fc{};
          for (const auto& v : on) fc = fc + v;
          fc = (1.0 / static_cast<double>(on.size())) * fc;
          Point e1 = on[0] - fc;
          e1 = (1.0 / norm(e1)) * e1;
          Point e2 = cross(h.normal, e1);
          std::sort(on.begin(), on.end(), [&](const Point& a, const Point& b) {
            return std::atan2(dot(a - fc, e2), dot(a - fc, e1)) <
                   std::atan2(dot(b - fc, e2), dot(b - fc, e1));
          });
          for (std::size_t i = 0; i < on.size(); ++i) {
            const Point& a = on[i];
            const Point& b = on[(i + 1) % on.size()];
            facet += 0.5 * std::abs(dot(cross(a - fc, b - fc), h.normal));
          }
        }
        vol += facet * (h.offset - dot(h.normal, c)) / dim_;
      }
      return vol;
    }
  }
  return 0.0;
}

BoundingBox ConvexDomain::bounding_box() const {
  BoundingBox bb;
  switch (kind_) {
    case Kind::box:
      for (int i = 0; i < dim_; ++i) {
        bb.lo[i] = intervals_[i].first;
        bb.hi[i] = intervals_[i].second;
      }
      break;
    case Kind::ball:
      for (int i = 0; i < dim_; ++i) {
        bb.lo[i] = center_[i] - radius_;
        bb.hi[i] = center_[i] + radius_;
      }
      break;
    case Kind::polytope:
      for (int i = 0; i < dim_; ++i) {
        bb.lo[i] = std::numeric_limits<double>::infinity();
        bb.hi[i] = -std::numeric_limits<double>::infinity();
        for (const auto& v : vertices_) {
          bb.lo[i] = std::min(bb.lo[i], v[i]);
          bb.hi[i] = std::max(bb.hi[i], v[i]);
        }
      }
      break;
  }
  return bb;
}

std::pair<Point, double> ConvexDomain::bounding_ball() const {
  if (kind_ == Kind::ball) return {center_, radius_};
  const BoundingBox bb = bounding_box();
  Point c = 0.5 * (bb.lo + bb.hi);
  double r = 0.0;
  for (const auto& v : vertices_) r = std::max(r, norm(v - c));
  return {c, r};
}

double ConvexDomain::ray_exit(const Point& x, const Point& dir) const {
  double t = std::numeric_limits<double>::infinity();
  switch (kind_) {
    case Kind::box:
      for (int i = 0; i < dim_; ++i) {
        if (dir[i] > 0.0) t = std::min(t, (intervals_[i].second - x[i]) / dir[i]);
        if (dir[i] < 0.0) t = std::min(t, (intervals_[i].first - x[i]) / dir[i]);
      }
      break;
    case Kind::ball: {
      // |x - c + t d|^2 = R^2, positive root.
      Point r = x - center_;
      Point d = dir;
      for (int i = dim_; i < 3; ++i) r[i] = d[i] = 0.0;
      const double a = dot(d, d);
      const double b = dot(r, d);
      const double c = dot(r, r) - radius_ * radius_;
      const double disc = b * b - a * c;
      if (a > 0.0 && disc >= 0.0) {
        const double sq = std::sqrt(disc);
        // Stable form of (-b + sq) / a.
        t = b <= 0.0 ? (-b + sq) / a : -c / (b + sq);
      }
      break;
    }
    case Kind::polytope:
      for (const auto& h : halfspaces_) {
        const double nd = dot(h.normal, dir);
        if (nd > 0.0) t = std::min(t, (h.offset - dot(h.normal, x)) / nd);
      }
      break;
  }
  if (!std::isfinite(t)) throw GeometryError("ray does not leave the domain");
  return std::max(t, 0.0);
}

double ConvexDomain::ray_exit_bisection(const Point& x, const Point& dir, double rel_tol) const {
  if (!contains(x)) throw GeometryError("ray origin must be interior");
  double lo = 0.0;
  double hi = 1.0;
  while (contains(x + hi * dir)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw GeometryError("ray does not leave the domain");
  }
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (contains(x + mid * dir))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

int Grid::index(const std::array<int, 3>& ijk) const {
  for (int a = 0; a < 3; ++a)
    if (ijk[a] < 0 || ijk[a] >= counts_[a]) return -1;
  return ijk[0] + counts_[0] * (ijk[1] + counts_[1] * ijk[2]);
}

std::array<int, 3> Grid::multi_index(int node) const {
  std::array<int, 3> ijk{};
  ijk[0] = node % counts_[0];
  node /= counts_[0];
  ijk[1] = node % counts_[1];
  ijk[2] = node / counts_[1];
  return ijk;
}

Point Grid::coords(const std::array<int, 3>& ijk) const {
  Point x{};
  for (int a = 0; a < dim_; ++a) x[a] = origin_[a] + spacing_ * ijk[a];
  return x;
}

Point Grid::coords(int node) const { return coords(multi_index(node)); }

double Grid::theta(int node, int axis, int dir) const {
  const int u = unknown_[node];
  if (u < 0) throw GeometryError("theta requested for a non-interior node");
  return theta_[u][2 * axis + (dir > 0 ? 0 : 1)];
}

Grid build_grid(const ConvexDomain& domain, int target_nodes_per_axis) {
  if (target_nodes_per_axis < 9) throw ResolutionError("need at least 9 nodes per axis");
  Grid g;
  g.domain_ = domain;
  g.dim_ = domain.dim();
  const BoundingBox bb = domain.bounding_box();
  double extent = 0.0;
  for (int a = 0; a < g.dim_; ++a) extent = std::max(extent, bb.hi[a] - bb.lo[a]);
  g.spacing_ = extent / (target_nodes_per_axis - 1);
  g.origin_ = bb.lo;
  g.counts_ = {1, 1, 1};
  for (int a = 0; a < g.dim_; ++a)
    g.counts_[a] = static_cast<int>(std::ceil((bb.hi[a] - bb.lo[a]) / g.spacing_ - 1e-9)) + 1;

  const int total = g.counts_[0] * g.counts_[1] * g.counts_[2];
  g.kind_.assign(total, NodeKind::exterior);
  g.unknown_.assign(total, -1);
  g.distance_.assign(total, 0.0);
  const double margin = 1e-10 * g.spacing_;
  for (int node = 0; node < total; ++node) {
    const double d = domain.depth(g.coords(node));
    if (d > margin) {
      g.kind_[node] = NodeKind::interior;
      g.unknown_[node] = static_cast<int>(g.interior_.size());
      g.interior_.push_back(node);
    }
    g.distance_[node] = std::max(d, 0.0);
  }
  if (g.interior_.empty()) throw ResolutionError("grid has no interior nodes");

  g.theta_.resize(g.interior_.size());
  for (std::size_t k = 0; k < g.interior_.size(); ++k) {
    const int node = g.interior_[k];
    const auto ijk = g.multi_index(node);
    const Point x = g.coords(ijk);
    auto& th = g.theta_[k];
    th.fill(1.0);
    for (int a = 0; a < g.dim_; ++a) {
      for (int s : {+1, -1}) {
        auto nb = ijk;
        nb[a] += s;
        const int nb_node = g.index(nb);
        double theta = 1.0;
        if (nb_node < 0 || !g.is_interior(nb_node)) {
          if (nb_node >= 0) g.kind_[nb_node] = NodeKind::boundary_cut;
          Point dir{};
          dir[a] = s * g.spacing_;
          theta = std::clamp(domain.ray_exit(x, dir), 0.0, 1.0);
          if (!(theta > 0.0)) throw GeometryError("interior node with zero cut distance");
        }
        th[2 * a + (s > 0 ? 0 : 1)] = theta;
      }
    }
  }
  return g;
}

std::vector<std::uint8_t> interior_shrink(const Grid& grid, double h) {
  std::vector<std::uint8_t> mask(grid.node_count(), 0);
  const auto& dist = grid.node_distance();
  for (int node : grid.interior_nodes())
    if (dist[node] > h) mask[node] = 1;
  return mask;
}

}  // namespace masharp
