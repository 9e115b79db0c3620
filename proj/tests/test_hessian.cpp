#include <cmath>

#include "doctest.h"
#include "masharp/error.hpp"
#include "masharp/hessian.hpp"
#include "masharp/solver.hpp"

using namespace masharp;

namespace {

GridField sampled(const ConvexDomain& d, int N, double (*fn)(const Point&)) {
  auto g = std::make_shared<const Grid>(build_grid(d, N));
  GridField u{g, std::vector<double>(g->node_count())};
  for (int node = 0; node < g->node_count(); ++node) u.values[node] = fn(g->coords(node));
  return u;
}

const ConvexDomain kSquare = ConvexDomain::box({{-1, 1}, {-1, 1}});

}  // namespace

TEST_CASE("quadratic examples") {
  SUBCASE("half squared norm") {
    const auto H = hessian_field(sampled(kSquare, 17, [](const Point& x) { return 0.5 * dot(x, x); }));
    for (std::size_t i = 0; i < H.nodes.size(); ++i) {
      CHECK(H.matrix[i][0] == doctest::Approx(1.0));
      CHECK(H.matrix[i][4] == doctest::Approx(1.0));
      CHECK(H.matrix[i][1] == doctest::Approx(0.0).epsilon(1e-10));
      CHECK(H.spectral_norm[i] == doctest::Approx(1.0));
      CHECK(H.det[i] == doctest::Approx(1.0));
    }
  }
  SUBCASE("2 x1^2 + x2^2") {
    const auto H = hessian_field(sampled(kSquare, 17, [](const Point& x) { return 2 * x[0] * x[0] + x[1] * x[1]; }));
    for (std::size_t i = 0; i < H.nodes.size(); ++i) {
      CHECK(H.matrix[i][0] == doctest::Approx(4.0));
      CHECK(H.matrix[i][4] == doctest::Approx(2.0));
      CHECK(H.spectral_norm[i] == doctest::Approx(4.0));
      CHECK(H.det[i] == doctest::Approx(8.0));
    }
  }
  SUBCASE("x1 x2") {
    const auto H = hessian_field(sampled(kSquare, 17, [](const Point& x) { return x[0] * x[1]; }));
    for (std::size_t i = 0; i < H.nodes.size(); ++i) {
      CHECK(H.matrix[i][1] == doctest::Approx(1.0));
      CHECK(H.matrix[i][3] == H.matrix[i][1]);
      CHECK(H.matrix[i][0] == doctest::Approx(0.0).epsilon(1e-10));
      CHECK(H.spectral_norm[i] == doctest::Approx(1.0));
      CHECK(H.det[i] == doctest::Approx(-1.0));
    }
  }
}

TEST_CASE("eligibility uses the 2 h sqrt(n) collar") {
  const auto u = sampled(ConvexDomain::ball({0, 0, 0}, 1.0, 2), 33, [](const Point& x) { return dot(x, x); });
  const auto H = hessian_field(u);
  const Grid& g = *u.grid;
  CHECK(H.eligibility_distance == doctest::Approx(2 * g.spacing() * std::sqrt(2.0)));
  for (int node : g.interior_nodes())
    CHECK(H.eligible(node) == (g.node_distance()[node] >= H.eligibility_distance));
  for (std::size_t i = 0; i < H.nodes.size(); ++i) CHECK(H.gradient[i][0] == doctest::Approx(2 * g.coords(H.nodes[i])[0]));
}

TEST_CASE("no eligible nodes is a resolution error") {
  // A slab nine spacings long but only one spacing thick has no node two
  // spacings from its boundary.
  const auto u = sampled(ConvexDomain::box({{0, 8}, {0, 1.5}}), 9, [](const Point&) { return 0.0; });
  CHECK_THROWS_AS(hessian_field(u), ResolutionError);
}

TEST_CASE("symmetric eigenvalues and determinants") {
  const SymMatrix m2{2.5, 1.5, 0, 1.5, 2.5, 0, 0, 0, 0};
  const auto e2 = symmetric_eigenvalues(m2, 2);
  CHECK(e2[0] == doctest::Approx(1.0));
  CHECK(e2[1] == doctest::Approx(4.0));
  CHECK(determinant(m2, 2) == doctest::Approx(4.0));
  // Eigenvalues 1, 2, 4 in a rotated frame.
  const SymMatrix m3{2.0, 0.0, 0.0, 0.0, 2.5, 1.5, 0.0, 1.5, 2.5};
  const auto e3 = symmetric_eigenvalues(m3, 3);
  CHECK(e3[0] == doctest::Approx(1.0));
  CHECK(e3[1] == doctest::Approx(2.0));
  CHECK(e3[2] == doctest::Approx(4.0));
  CHECK(determinant(m3, 3) == doctest::Approx(8.0));
}

TEST_CASE("Hadamard report examples") {
  SUBCASE("diagonal Hessian gives equality") {
    const auto H = hessian_field(sampled(kSquare, 17, [](const Point& x) { return 2 * x[0] * x[0] + x[1] * x[1]; }));
    std::vector<double> f(H.grid->node_count(), 8.0);
    const auto r = hadamard_report(H, f, 0.0);
    CHECK(r.pass);
    CHECK(r.violations == 0);
    CHECK(r.worst.det == doctest::Approx(8.0));
    CHECK(r.worst.diag_product == doctest::Approx(8.0));
    CHECK(r.max_relative_residual <= 1e-10);
  }
  SUBCASE("rotated diag(1,4)") {
    const auto H = hessian_field(
        sampled(kSquare, 17, [](const Point& x) { return 1.25 * x[0] * x[0] + 1.5 * x[0] * x[1] + 1.25 * x[1] * x[1]; }));
    std::vector<double> f(H.grid->node_count(), 4.0);
    const auto r = hadamard_report(H, f, 0.5);
    CHECK(r.pass);
    CHECK(r.worst.det == doctest::Approx(4.0));
    CHECK(r.worst.diag_product == doctest::Approx(6.25));
    CHECK(r.tolerance == doctest::Approx(6.25e-8));
    CHECK(r.far_nodes > 0);
    CHECK(r.far_nodes < r.checked);
  }
  SUBCASE("an indefinite 3 x 3 Hessian violates the inequality") {
    // Hessian [[-1,0,0],[0,1,2],[0,2,1]]: det 3 against a diagonal product of -1.
    const auto cube = ConvexDomain::box({{-1, 1}, {-1, 1}, {-1, 1}});
    const auto H = hessian_field(
        sampled(cube, 9, [](const Point& x) { return 0.5 * (-x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) + 2 * x[1] * x[2]; }));
    std::vector<double> f(H.grid->node_count(), 1.0);
    const auto r = hadamard_report(H, f, 0.0);
    CHECK_FALSE(r.pass);
    CHECK(r.violations == r.checked);
  }
}

TEST_CASE("directional profile of x1^2/2") {
  const auto u = sampled(ConvexDomain::box({{-1, 1}, {0, 2}}), 33, [](const Point& x) { return 0.5 * x[0] * x[0]; });
  const auto H = hessian_field(u);
  const auto p = directional_profile(u, H, 0, {0, 1, 0}, -0.5, 0.5);
  CHECK(p.x.front() == doctest::Approx(-0.5));
  CHECK(p.x.back() == doctest::Approx(0.5));
  CHECK(p.slope_difference == doctest::Approx(1.0));
  CHECK(p.trapezoid_integral == doctest::Approx(1.0));
  CHECK_THROWS_AS(directional_profile(u, H, 0, {0, 1, 0}, 0.0, 0.01), ResolutionError);
  const auto v = sampled(ConvexDomain::ball({0, 0, 0}, 1, 2), 33, [](const Point& x) { return x[0]; });
  CHECK_THROWS_AS(directional_profile(v, hessian_field(v), 0, {0, 0, 0}, -0.5, 0.5), GeometryError);
}

TEST_CASE("profiles of a converged box solution are consistent") {
  ProblemSpec spec;
  spec.domain = ConvexDomain::box({{-1, 1}, {0, 2}});
  const auto g = std::make_shared<const Grid>(build_grid(spec.domain, 65));
  const auto [u, rep] = solve_dirichlet(spec, g, default_solver_config(2));
  REQUIRE(rep.converged);
  const auto H = hessian_field(u);
  const auto p = directional_profile(u, H, 0, {0, 0.1, 0}, -0.5, 0.5);
  CHECK(std::abs(p.slope_difference - p.trapezoid_integral) <= 1e-6 * (p.slope_difference + 1));
  CHECK(p.slope_difference >= 0.0);
  CHECK(p.slope_difference <= p.convexity_bound);
  // Axis second differences of a discretely convex field are nonnegative.
  for (std::size_t i = 0; i < H.nodes.size(); ++i) {
    CHECK(H.matrix[i][0] >= -1e-6);
    CHECK(H.matrix[i][4] >= -1e-6);
  }
}
