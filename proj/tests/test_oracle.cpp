#include <cmath>

#include "doctest.h"
#include "masharp/error.hpp"
#include "masharp/oracle.hpp"

using namespace masharp;

TEST_CASE("subgradient area of a single cone") {
  // Centre at depth 1 with four axis neighbours at unit distance: the
  // subgradient set is the square |p_i| <= 1.
  const std::vector<Point> pts{{0, 0, 0}, {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
  const std::vector<double> vals{-1, 0, 0, 0, 0};
  CHECK(subgradient_area(pts, vals, 0) == doctest::Approx(4.0));
  // A point above the hull has no subgradient.
  const std::vector<double> raised{1, 0, 0, 0, 0};
  CHECK(subgradient_area(pts, raised, 0) == doctest::Approx(0.0));
}

TEST_CASE("one node in the unit square") {
  // Boundary points sit at distance 1/2 along the axes and at the corners,
  // so the subgradient set of the cone is |p1| + |p2| <= 2t with area 8 t^2.
  const auto square = ConvexDomain::box({{0, 1}, {0, 1}});
  OracleOptions opt;
  opt.cell_areas = {0.5};
  const auto r = oliker_prussner_oracle(square, Expression::constant(1.0), {{0.5, 0.5, 0}}, opt);
  REQUIRE(r.values.size() == 1);
  CHECK(r.masses[0] == doctest::Approx(0.5));
  CHECK(r.values[0] == doctest::Approx(-std::sqrt(0.5 / 8.0)).epsilon(1e-8));
  CHECK(r.max_defect <= opt.tolerance);
}

TEST_CASE("polar net on the unit disc tracks the quadratic solution") {
  const auto disc = ConvexDomain::ball({0, 0, 0}, 1.0, 2);
  std::vector<Point> nodes{{0, 0, 0}};
  for (int ring = 1; ring <= 4; ++ring)
    for (int k = 0; k < 12; ++k) {
      const double r = 0.2 * ring, a = 2 * M_PI * (k + 0.5 * (ring % 2)) / 12;
      nodes.push_back({r * std::cos(a), r * std::sin(a), 0});
    }
  const auto res = oliker_prussner_oracle(disc, Expression::constant(1.0), nodes);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double exact = 0.5 * (dot(nodes[i], nodes[i]) - 1.0);
    CHECK(std::abs(res.values[i] - exact) <= 0.05 * 0.5);
    CHECK(res.values[i] < 0.0);
  }
}

TEST_CASE("oracle errors") {
  const auto square = ConvexDomain::box({{0, 1}, {0, 1}});
  const auto f = Expression::constant(1.0);
  CHECK_THROWS_AS(oliker_prussner_oracle(ConvexDomain::box({{0, 1}, {0, 1}, {0, 1}}), f, {{0.5, 0.5, 0.5}}), SpecError);
  std::vector<Point> many;
  for (int i = 1; i <= 15; ++i)
    for (int j = 1; j <= 15; ++j) many.push_back({i / 16.0, j / 16.0, 0});
  CHECK_THROWS_AS(oliker_prussner_oracle(square, f, many), SpecError);
  CHECK_THROWS_AS(oliker_prussner_oracle(square, f, {{0.5, 1.5, 0}}), OutsideDomainError);
  OracleOptions opt;
  opt.max_lifts = 1;
  const std::vector<Point> few{{0.25, 0.25, 0}, {0.75, 0.25, 0}, {0.25, 0.75, 0}, {0.75, 0.75, 0}};
  CHECK_THROWS_AS(oliker_prussner_oracle(square, f, few, opt), ConvergenceError);
}
