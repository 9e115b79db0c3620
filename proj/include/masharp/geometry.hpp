#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

namespace masharp {

/// Point or vector in R^n, n <= 3. Components beyond the dimension are zero.
using Point = std::array<double, 3>;

inline double dot(const Point& a, const Point& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
double norm(const Point& a);
Point operator+(const Point& a, const Point& b);
Point operator-(const Point& a, const Point& b);
Point operator*(double s, const Point& a);

/// Closed half-space {x : normal . x <= offset} with a unit normal.
struct HalfSpace {
  Point normal{};
  double offset = 0.0;
};

struct BoundingBox {
  Point lo{};
  Point hi{};
};

/// Bounded convex domain: axis-aligned box, Euclidean ball, or an
/// intersection of half-spaces. Instances are immutable after construction.
class ConvexDomain {
 public:
  enum class Kind { box, ball, polytope };

  /// Box with one [a_i, b_i] interval per axis, 2 or 3 axes.
  static ConvexDomain box(const std::vector<std::pair<double, double>>& intervals);
  static ConvexDomain ball(const Point& center, double radius, int dim);
  /// Validates unit normals, boundedness (trivial recession cone) and a
  /// nonempty interior (positive Chebyshev radius).
  static ConvexDomain polytope(const std::vector<HalfSpace>& halfspaces, int dim);
  /// The box written as 2n half-spaces.
  static ConvexDomain box_as_polytope(const std::vector<std::pair<double, double>>& intervals);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }

  const std::vector<std::pair<double, double>>& intervals() const { return intervals_; }
  const Point& center() const { return center_; }
  double radius() const { return radius_; }
  const std::vector<HalfSpace>& halfspaces() const { return halfspaces_; }

  /// Signed depth: distance to the boundary for points inside, negative of
  /// the largest constraint violation outside.
  double depth(const Point& x) const;
  /// Open-domain membership.
  bool contains(const Point& x) const { return depth(x) > 0.0; }

  /// Euclidean distance from x to the boundary; throws OutsideDomainError
  /// when x lies outside the closed domain by more than `tolerance`.
  double dist_to_boundary(const Point& x, double tolerance = 1e-12) const;
  double diameter() const;
  double volume() const;
  BoundingBox bounding_box() const;
  /// Ball containing the domain: (center, radius).
  std::pair<Point, double> bounding_ball() const;
  /// Corner points (box, polytope); empty for balls.
  const std::vector<Point>& vertices() const { return vertices_; }

  /// Largest t >= 0 with x + t*dir in the closed domain, for x inside.
  double ray_exit(const Point& x, const Point& dir) const;
  /// Same quantity found by bisection on the membership predicate.
  double ray_exit_bisection(const Point& x, const Point& dir, double rel_tol = 1e-12) const;

 private:
  ConvexDomain() = default;
  void compute_polytope_vertices();

  Kind kind_ = Kind::box;
  int dim_ = 2;
  std::vector<std::pair<double, double>> intervals_;
  Point center_{};
  double radius_ = 0.0;
  std::vector<HalfSpace> halfspaces_;
  std::vector<Point> vertices_;
};

enum class NodeKind : std::uint8_t { exterior, interior, boundary_cut };

/// Uniform grid over the bounding box of a domain with node classification
/// and per-axis cut fractions for interior nodes.
class Grid {
 public:
  int dim() const { return dim_; }
  double spacing() const { return spacing_; }
  const Point& origin() const { return origin_; }
  const std::array<int, 3>& counts() const { return counts_; }
  int node_count() const { return static_cast<int>(kind_.size()); }
  const ConvexDomain& domain() const { return domain_; }

  NodeKind kind(int node) const { return kind_[node]; }
  bool is_interior(int node) const { return kind_[node] == NodeKind::interior; }

  /// Flat index of a multi-index, or -1 when outside the index range.
  int index(const std::array<int, 3>& ijk) const;
  std::array<int, 3> multi_index(int node) const;
  Point coords(int node) const;
  Point coords(const std::array<int, 3>& ijk) const;

  /// Interior nodes in increasing flat order.
  const std::vector<int>& interior_nodes() const { return interior_; }
  /// Position of a node in interior_nodes(), or -1.
  int unknown(int node) const { return unknown_[node]; }
  int unknown_count() const { return static_cast<int>(interior_.size()); }

  /// Fraction theta in (0, 1] of the arm from an interior node along
  /// +e_axis (dir = +1) or -e_axis (dir = -1) that stays inside the domain;
  /// 1 when the neighbour is interior.
  double theta(int node, int axis, int dir) const;

  /// Distance to the boundary for every node inside the closed domain (0
  /// for exterior nodes).
  const std::vector<double>& node_distance() const { return distance_; }

 private:
  friend Grid build_grid(const ConvexDomain& domain, int target_nodes_per_axis);

  ConvexDomain domain_ = ConvexDomain::ball({0, 0, 0}, 1.0, 2);
  int dim_ = 2;
  double spacing_ = 0.0;
  Point origin_{};
  std::array<int, 3> counts_{1, 1, 1};
  std::vector<NodeKind> kind_;
  std::vector<int> interior_;
  std::vector<int> unknown_;
  std::vector<std::array<double, 6>> theta_;
  std::vector<double> distance_;
};

/// Grid with spacing (largest extent)/(target - 1) anchored at the lower
/// corner of the bounding box. Nodes closer than 1e-10 * spacing to the
/// boundary count as exterior.
Grid build_grid(const ConvexDomain& domain, int target_nodes_per_axis);

/// Mask (one entry per node) of interior nodes with distance > h.
std::vector<std::uint8_t> interior_shrink(const Grid& grid, double h);

}  // namespace masharp
