#include <cmath>
#include <random>

#include "doctest.h"
#include "masharp/error.hpp"
#include "masharp/geometry.hpp"

using namespace masharp;

namespace {

ConvexDomain diamond() {
  const double r = 1.0 / std::sqrt(2.0);
  return ConvexDomain::polytope({{{r, r, 0}, r}, {{-r, r, 0}, r}, {{r, -r, 0}, r}, {{-r, -r, 0}, r}}, 2);
}

}  // namespace

TEST_CASE("boundary distance in boxes, balls and polytopes") {
  const auto box = ConvexDomain::box({{-1, 1}, {0, 2}});
  CHECK(box.dist_to_boundary({0, 0.3, 0}) == doctest::Approx(0.3));
  const auto ball = ConvexDomain::ball({0, 0, 0}, 1.0, 2);
  CHECK(ball.dist_to_boundary({0.5, 0, 0}) == doctest::Approx(0.5));
  const auto square = ConvexDomain::box_as_polytope({{0, 1}, {0, 1}});
  CHECK(square.dist_to_boundary({0.5, 0.5, 0}) == doctest::Approx(0.5));
}

TEST_CASE("points outside the closed domain report their violation") {
  const auto box = ConvexDomain::box({{-1, 1}, {0, 2}});
  try {
    box.dist_to_boundary({0, -0.25, 0});
    FAIL("expected OutsideDomainError");
  } catch (const OutsideDomainError& e) {
    CHECK(e.violation() == doctest::Approx(0.25));
  }
  CHECK_NOTHROW(box.dist_to_boundary({1, 1, 0}));
}

TEST_CASE("diameters") {
  CHECK(ConvexDomain::box({{-1, 1}, {-1, 1}}).diameter() == doctest::Approx(2 * std::sqrt(2.0)));
  CHECK(ConvexDomain::ball({0, 0, 0}, 1.0, 2).diameter() == doctest::Approx(2.0));
  CHECK(ConvexDomain::box_as_polytope({{0, 1}, {0, 1}}).diameter() == doctest::Approx(std::sqrt(2.0)));
  CHECK(diamond().diameter() == doctest::Approx(2.0));
}

TEST_CASE("volumes") {
  CHECK(ConvexDomain::box({{-1, 1}, {0, 2}}).volume() == doctest::Approx(4.0));
  CHECK(ConvexDomain::ball({0, 0, 0}, 1.0, 2).volume() == doctest::Approx(M_PI));
  CHECK(ConvexDomain::ball({0, 0, 0}, 1.0, 3).volume() == doctest::Approx(4.0 * M_PI / 3.0));
  CHECK(diamond().volume() == doctest::Approx(2.0));
}

TEST_CASE("invalid domains are rejected") {
  CHECK_THROWS_AS(ConvexDomain::box({{1, -1}, {0, 2}}), GeometryError);
  CHECK_THROWS_AS(ConvexDomain::ball({0, 0, 0}, 0.0, 2), GeometryError);
  CHECK_THROWS_AS(ConvexDomain::polytope({{{1, 0, 0}, 1}, {{0, 1, 0}, 1}}, 2), UnboundedDomainError);
  CHECK_THROWS_AS(ConvexDomain::polytope({{{2, 0, 0}, 1}, {{-1, 0, 0}, 1}, {{0, 1, 0}, 1}, {{0, -1, 0}, 1}}, 2),
                  GeometryError);
  // Empty interior: x <= 0 and -x <= -1.
  CHECK_THROWS_AS(ConvexDomain::polytope({{{1, 0, 0}, 0}, {{-1, 0, 0}, -1}, {{0, 1, 0}, 1}, {{0, -1, 0}, 1}}, 2),
                  GeometryError);
}

TEST_CASE("ray exits agree with bisection on the membership predicate") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-0.4, 0.4), A(0.0, 2 * M_PI);
  const ConvexDomain domains[] = {ConvexDomain::box({{-1, 1}, {0, 2}}), ConvexDomain::ball({0, 0, 0}, 1.0, 2), diamond()};
  for (const auto& d : domains)
    for (int t = 0; t < 50; ++t) {
      const auto bb = d.bounding_box();
      const Point x{0.5 * (bb.lo[0] + bb.hi[0]) + U(rng), 0.5 * (bb.lo[1] + bb.hi[1]) + U(rng), 0};
      const double a = A(rng);
      const Point dir{std::cos(a), std::sin(a), 0};
      CHECK(d.ray_exit(x, dir) == doctest::Approx(d.ray_exit_bisection(x, dir)).epsilon(1e-9));
    }
}

TEST_CASE("grid spacing and classification") {
  SUBCASE("ball with 33 nodes per axis") {
    const Grid g = build_grid(ConvexDomain::ball({0, 0, 0}, 1.0, 2), 33);
    CHECK(g.spacing() == doctest::Approx(2.0 / 32));
    const int centre = g.index({16, 16, 0});
    CHECK(g.is_interior(centre));
    CHECK(g.coords(centre)[0] == doctest::Approx(0.0));
  }
  SUBCASE("box with 17 nodes per axis") {
    const Grid g = build_grid(ConvexDomain::box({{-1, 1}, {0, 2}}), 17);
    int expected = 0;
    for (int node = 0; node < g.node_count(); ++node) {
      const Point x = g.coords(node);
      const bool inside = std::abs(x[0]) < 1 - 1e-12 && x[1] > 1e-12 && x[1] < 2 - 1e-12;
      expected += inside;
      CHECK(g.is_interior(node) == inside);
    }
    CHECK(g.unknown_count() == expected);
    CHECK(expected == 15 * 15);
  }
  SUBCASE("rotated square matches brute-force membership") {
    const auto d = diamond();
    const Grid g = build_grid(d, 33);
    int inside = 0;
    for (int node = 0; node < g.node_count(); ++node) {
      const Point x = g.coords(node);
      const bool strictly = std::abs(x[0]) + std::abs(x[1]) < 1.0 - 1e-10 * g.spacing();
      inside += strictly;
      CHECK(g.is_interior(node) == strictly);
    }
    CHECK(g.unknown_count() == inside);
  }
}

TEST_CASE("cut fractions place boundary arms on the boundary") {
  const auto ball = ConvexDomain::ball({0, 0, 0}, 1.0, 2);
  const Grid g = build_grid(ball, 17);
  for (int node : g.interior_nodes())
    for (int axis = 0; axis < 2; ++axis)
      for (int dir : {-1, 1}) {
        const double th = g.theta(node, axis, dir);
        REQUIRE(th > 0.0);
        REQUIRE(th <= 1.0);
        if (th < 1.0) {
          Point y = g.coords(node);
          y[axis] += dir * th * g.spacing();
          CHECK(std::hypot(y[0], y[1]) == doctest::Approx(1.0).epsilon(1e-10));
        }
      }
}

TEST_CASE("interior shrink masks") {
  const auto box = ConvexDomain::box({{-1, 1}, {0, 2}});
  const Grid g = build_grid(box, 33);
  const auto all = interior_shrink(g, 0.0);
  const auto quarter = interior_shrink(g, 0.25);
  for (int node = 0; node < g.node_count(); ++node) {
    CHECK(static_cast<bool>(all[node]) == g.is_interior(node));
    const Point x = g.coords(node);
    const bool in = std::abs(x[0]) < 0.75 - 1e-12 && x[1] > 0.25 + 1e-12 && x[1] < 1.75 - 1e-12;
    CHECK(static_cast<bool>(quarter[node]) == in);
  }
  const Grid gb = build_grid(ConvexDomain::ball({0, 0, 0}, 1.0, 2), 33);
  const auto half = interior_shrink(gb, 0.5);
  for (int node = 0; node < gb.node_count(); ++node) {
    const Point x = gb.coords(node);
    if (std::abs(std::hypot(x[0], x[1]) - 0.5) > 1e-9) CHECK(static_cast<bool>(half[node]) == (std::hypot(x[0], x[1]) < 0.5));
  }
}

TEST_CASE("box and box-as-polytope agree") {
  const std::vector<std::pair<double, double>> iv{{-1, 1}, {0, 2}, {-0.5, 0.5}};
  const auto a = ConvexDomain::box(iv);
  const auto b = ConvexDomain::box_as_polytope(iv);
  const Grid ga = build_grid(a, 13), gb = build_grid(b, 13);
  REQUIRE(ga.node_count() == gb.node_count());
  for (int node = 0; node < ga.node_count(); ++node) {
    CHECK(ga.kind(node) == gb.kind(node));
    CHECK(ga.node_distance()[node] == doctest::Approx(gb.node_distance()[node]).epsilon(1e-12));
  }
  CHECK(a.diameter() == doctest::Approx(b.diameter()));
}

TEST_CASE("interior distances are positive and at most half the diameter") {
  for (const auto& d : {ConvexDomain::box({{-1, 1}, {0, 2}}), ConvexDomain::ball({0.1, 0, 0}, 0.8, 2), diamond()}) {
    const Grid g = build_grid(d, 25);
    for (int node : g.interior_nodes()) {
      CHECK(g.node_distance()[node] > 0.0);
      CHECK(g.node_distance()[node] <= d.diameter() / 2 + 1e-12);
    }
  }
}
