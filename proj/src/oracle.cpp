#include "masharp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "masharp/error.hpp"

namespace masharp {
namespace {

struct V2 {
  double x, y;
  int edge = -1;  // constraint carrying the edge that starts here
};

using Polygon = std::vector<V2>;

double polygon_area(const Polygon& poly) {
  double a = 0.0;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const V2& p = poly[k];
    const V2& q = poly[(k + 1) % poly.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * std::abs(a);
}

// Keeps the part of `poly` with a.x * p.x + a.y * p.y <= c; new edges get
// the label `label`.
void clip(Polygon& poly, double ax, double ay, double c, int label, Polygon& scratch) {
  scratch.clear();
  const std::size_t m = poly.size();
  for (std::size_t k = 0; k < m; ++k) {
    const V2& p = poly[k];
    const V2& q = poly[(k + 1) % m];
    const double fp = ax * p.x + ay * p.y - c;
    const double fq = ax * q.x + ay * q.y - c;
    if (fp <= 0.0) scratch.push_back(p);
    if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) {
      const double s = fp / (fp - fq);
      scratch.push_back({p.x + s * (q.x - p.x), p.y + s * (q.y - p.y), fp < 0.0 ? label : p.edge});
    }
  }
  poly.swap(scratch);
}

Polygon square(double cx, double cy, double half) {
  return {{cx - half, cy - half}, {cx + half, cy - half}, {cx + half, cy + half}, {cx - half, cy + half}};
}

// Subgradient polygon at point i, with every slope bounded by `radius` in
// norm. Edges are labelled with the index of the point that generates them.
void subgradient_polygon(const std::vector<Point>& pts, const std::vector<double>& vals, int i,
                         double radius, Polygon& poly, Polygon& scratch) {
  poly.clear();
  if (!(radius > 0.0)) return;
  poly = square(0.0, 0.0, radius * (1.0 + 1e-6));
  const double xi = pts[i][0], yi = pts[i][1], ui = vals[i];
  for (std::size_t j = 0; j < pts.size() && !poly.empty(); ++j) {
    if (static_cast<int>(j) == i) continue;
    clip(poly, pts[j][0] - xi, pts[j][1] - yi, vals[j] - ui, static_cast<int>(j), scratch);
  }
  if (poly.size() < 3) poly.clear();
}

// Rate of change of the polygon area when u_i decreases: every constraint
// line p.(x_j - x_i) = u_j - u_i moves outward at speed 1 / |x_j - x_i|.
double area_growth_rate(const std::vector<Point>& pts, int i, const Polygon& poly) {
  double rate = 0.0;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const V2& p = poly[k];
    if (p.edge < 0) continue;
    const V2& q = poly[(k + 1) % poly.size()];
    const double dx = pts[p.edge][0] - pts[i][0], dy = pts[p.edge][1] - pts[i][1];
    rate += std::hypot(q.x - p.x, q.y - p.y) / std::hypot(dx, dy);
  }
  return rate;
}

double cross(const V2& o, const V2& a, const V2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Counter-clockwise convex hull (Andrew's monotone chain).
Polygon convex_hull(std::vector<V2> p) {
  std::sort(p.begin(), p.end(), [](const V2& a, const V2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  if (p.size() < 3) return p;
  Polygon h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(h[k - 2], h[k - 1], p[i - 1]) <= 0) --k;
    h[k++] = p[i - 1];
  }
  h.resize(k - 1);
  return h;
}

// Signed distance from x to the boundary of a counter-clockwise convex
// polygon (positive inside).
double hull_depth(const Polygon& hull, const V2& x) {
  if (hull.size() < 3) return -1.0;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < hull.size(); ++k) {
    const V2& a = hull[k];
    const V2& b = hull[(k + 1) % hull.size()];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    d = std::min(d, cross(a, b, x) / len);
  }
  return d;
}

Polygon domain_polygon(const ConvexDomain& domain) {
  Polygon poly;
  if (domain.kind() == ConvexDomain::Kind::ball) {
    const int m = 4096;
    for (int k = 0; k < m; ++k) {
      const double t = 2.0 * std::numbers::pi * k / m;
      poly.push_back({domain.center()[0] + domain.radius() * std::cos(t),
                      domain.center()[1] + domain.radius() * std::sin(t)});
    }
    return poly;
  }
  for (const Point& v : domain.vertices()) poly.push_back({v[0], v[1]});
  return convex_hull(poly);
}

std::vector<Point> default_boundary_points(const ConvexDomain& domain, const std::vector<Point>& nodes) {
  std::vector<Point> out;
  auto add = [&](const Point& p) {
    for (const Point& q : out)
      if (std::abs(p[0] - q[0]) <= 1e-12 && std::abs(p[1] - q[1]) <= 1e-12) return;
    out.push_back(p);
  };
  const Point dirs[4] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
  for (const Point& x : nodes)
    for (const Point& d : dirs) add(x + domain.ray_exit(x, d) * d);
  for (const Point& v : domain.vertices()) add(v);
  return out;
}

}  // namespace

double subgradient_area(const std::vector<Point>& points, const std::vector<double>& values, int i) {
  Polygon others;
  for (std::size_t j = 0; j < points.size(); ++j)
    if (static_cast<int>(j) != i) others.push_back({points[j][0], points[j][1]});
  const double depth = hull_depth(convex_hull(others), {points[i][0], points[i][1]});
  if (!(depth > 0.0))
    throw GeometryError("point is not strictly inside the hull of the other points");
  double top = values[i];
  for (double v : values) top = std::max(top, v);
  Polygon poly, scratch;
  subgradient_polygon(points, values, i, (top - values[i]) / depth, poly, scratch);
  return polygon_area(poly);
}

OracleResult oliker_prussner_oracle(const ConvexDomain& domain, const Expression& f,
                                    const std::vector<Point>& nodes, const OracleOptions& options) {
  if (domain.dim() != 2) throw SpecError("the subgradient oracle is planar only");
  if (nodes.empty() || nodes.size() > 200) throw SpecError("the oracle takes between 1 and 200 nodes");
  for (const Point& x : nodes)
    if (!domain.contains(x)) throw OutsideDomainError("oracle node outside the open domain", -domain.depth(x));

  OracleResult res;
  res.boundary_points = options.boundary_points.empty() ? default_boundary_points(domain, nodes)
                                                        : options.boundary_points;
  const int m = static_cast<int>(nodes.size());
  std::vector<Point> pts = nodes;
  pts.insert(pts.end(), res.boundary_points.begin(), res.boundary_points.end());
  std::vector<double> vals(pts.size(), 0.0);

  // Prescribed masses.
  std::vector<double> cells = options.cell_areas;
  if (cells.empty()) {
    const Polygon dom = domain_polygon(domain);
    Polygon poly, scratch;
    for (int i = 0; i < m; ++i) {
      poly = dom;
      const double xi = pts[i][0], yi = pts[i][1];
      for (std::size_t j = 0; j < pts.size() && !poly.empty(); ++j) {
        if (static_cast<int>(j) == i) continue;
        const double ax = pts[j][0] - xi, ay = pts[j][1] - yi;
        const double c = 0.5 * (pts[j][0] * pts[j][0] + pts[j][1] * pts[j][1] - xi * xi - yi * yi);
        clip(poly, ax, ay, c, static_cast<int>(j), scratch);
      }
      cells.push_back(poly.size() < 3 ? 0.0 : polygon_area(poly));
    }
  } else if (static_cast<int>(cells.size()) != m) {
    throw SpecError("cell_areas must have one entry per node");
  }
  res.masses.resize(m);
  for (int i = 0; i < m; ++i) res.masses[i] = f(nodes[i]) * cells[i];

  // Depth of each node inside the hull of the boundary points bounds the
  // slopes of its subgradients by |u_i| / depth.
  Polygon bpoly;
  for (const Point& b : res.boundary_points) bpoly.push_back({b[0], b[1]});
  const Polygon bhull = convex_hull(bpoly);
  std::vector<double> depth(m);
  for (int i = 0; i < m; ++i) {
    depth[i] = hull_depth(bhull, {nodes[i][0], nodes[i][1]});
    if (!(depth[i] > 0.0)) throw GeometryError("oracle node is not inside the hull of the boundary points");
  }

  Polygon poly, scratch;
  auto area_at = [&](int i, double t) {
    vals[i] = -t;
    subgradient_polygon(pts, vals, i, t / depth[i], poly, scratch);
    return polygon_area(poly);
  };

  const double tol = options.tolerance;
  while (true) {
    double max_defect = 0.0;
    for (int i = 0; i < m; ++i) max_defect = std::max(max_defect, res.masses[i] - area_at(i, -vals[i]));
    res.max_defect = max_defect;
    if (max_defect <= tol) break;
    ++res.sweeps;
    for (int i = 0; i < m; ++i) {
      const double lo0 = -vals[i];
      if (res.masses[i] - area_at(i, lo0) <= tol) continue;
      if (++res.lifts > options.max_lifts) {
        std::ostringstream os;
        os << "subgradient oracle exceeded " << options.max_lifts << " lifts (max mass defect "
           << max_defect << ")";
        throw ConvergenceError(os.str());
      }
      // The square root of the area is concave and increasing in the depth
      // t = -u_i, so Newton steps on it started below the root stay below
      // it. Every defect therefore stays >= 0 and the sweep is monotone.
      // Bisection takes over whenever a Newton step leaves the bracket.
      const double target = std::sqrt(res.masses[i]);
      double lo = lo0;
      double step = std::sqrt(res.masses[i]) * depth[i] + lo0;
      double hi = lo0 + step;
      while (area_at(i, hi) < res.masses[i]) {
        lo = hi;
        step *= 2.0;
        hi = lo0 + step;
      }
      double a_lo = area_at(i, lo);
      for (int it = 0; it < 200 && res.masses[i] - a_lo > 0.01 * tol && hi - lo > 1e-16 * hi; ++it) {
        double next = 0.5 * (lo + hi);
        if (a_lo > 0.0) {
          const double rate = area_growth_rate(pts, i, poly);
          const double g = std::sqrt(a_lo);
          if (rate > 0.0) {
            const double newton = lo + (target - g) * 2.0 * g / rate;
            if (newton > lo && newton < hi) next = newton;
          }
        }
        const double a = area_at(i, next);
        if (a < res.masses[i]) {
          lo = next;
          a_lo = a;
        } else {
          hi = next;
          a_lo = area_at(i, lo);
        }
      }
      vals[i] = -lo;
    }
  }
  res.values.assign(vals.begin(), vals.begin() + m);
  return res;
}

}  // namespace masharp
