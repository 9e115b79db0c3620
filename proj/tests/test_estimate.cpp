#include <cmath>

#include "doctest.h"
#include "masharp/error.hpp"
#include "masharp/estimate.hpp"
#include "masharp/solver.hpp"

using namespace masharp;

namespace {

GridField sampled(const ConvexDomain& d, int N, const std::function<double(const Point&)>& fn) {
  auto g = std::make_shared<const Grid>(build_grid(d, N));
  GridField u{g, std::vector<double>(g->node_count(), 0.0)};
  for (int node = 0; node < g->node_count(); ++node) u.values[node] = fn(g->coords(node));
  return u;
}

GridField solved_box(int N) {
  ProblemSpec spec;
  spec.domain = ConvexDomain::box({{-1, 1}, {0, 2}});
  const auto g = std::make_shared<const Grid>(build_grid(spec.domain, N));
  auto [u, rep] = solve_dirichlet(spec, g, default_solver_config(2));
  REQUIRE(rep.converged);
  return u;
}

}  // namespace

TEST_CASE("power law fits are exact") {
  std::vector<double> d, v;
  for (int k = 0; k < 8; ++k) {
    d.push_back(0.01 * std::pow(2.0, k));
    v.push_back(3.0 * std::sqrt(d.back()));
  }
  const auto fit = fit_growth_exponent(d, v);
  CHECK(fit.exponent == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(fit.band <= 1e-10);
  CHECK(std::exp(fit.intercept) == doctest::Approx(3.0));
}

TEST_CASE("d |log d| has an effective exponent below one") {
  std::vector<double> d, v;
  for (int k = 0; k < 7; ++k) {
    d.push_back(1e-3 * std::pow(2.0, k));
    v.push_back(d.back() * std::abs(std::log(d.back())));
  }
  const auto fit = fit_growth_exponent(d, v);
  CHECK(fit.exponent > 0.75);
  CHECK(fit.exponent < 0.95);
  CHECK(fit.band > 0.0);
}

TEST_CASE("ill-posed fits are rejected") {
  const std::vector<double> ok_d{1, 2, 3, 4, 5, 6}, ok_v{1, 1, 1, 1, 1, 1};
  CHECK_THROWS_AS(fit_growth_exponent({1, 2, 4, 8, 16}, {1, 2, 3, 4, 5}), FitError);
  CHECK_THROWS_AS(fit_growth_exponent({1, 1.1, 1.2, 1.3, 1.4, 1.5}, ok_v), FitError);
  CHECK_THROWS_AS(fit_growth_exponent({1, 2, 4, 8, 16, 32}, {1, 0, 1, 1, 1, 1}), FitError);
  CHECK_THROWS_AS(fit_growth_exponent(ok_d, {1, 1, 1}), FitError);
  CHECK_NOTHROW(fit_growth_exponent(ok_d, ok_v));
}

TEST_CASE("constant Hessian: beta only measures the growth of the shrunk domain") {
  const auto u = sampled(ConvexDomain::box({{-1, 1}, {0, 2}}), 129, [](const Point& x) { return 0.5 * dot(x, x); });
  const auto H = hessian_field(u);
  const std::vector<double> hs{0.5, 0.25, 0.125, 0.0625};
  const auto rep = integrability_sweep(H, {0.5, 1.0, 2.0}, hs);
  REQUIRE(rep.beta.size() == 3);
  // I(delta, h) = |D^2 u|^delta |Omega_h| with |Omega_h| = (2 - 2h)^2, so
  // every delta shares the slope of log |Omega_h| against log(1/h).
  std::vector<double> area;
  for (double h : hs) area.push_back(std::pow(2 - 2 * h, 2));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < hs.size(); ++k) {
    const double x = std::log(1 / hs[k]), y = std::log(area[k]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double m = static_cast<double>(hs.size());
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  for (std::size_t i = 0; i < rep.beta.size(); ++i) {
    CHECK(rep.beta[i] == doctest::Approx(rep.beta[0]).epsilon(1e-10));
    CHECK(rep.beta[i] == doctest::Approx(slope).epsilon(0.05));
  }
  CHECK_THROWS_AS(integrability_sweep(H, {1.0}, {0.5, 0.25, 0.01, 0.005}), ResolutionError);
  CHECK_THROWS_AS(integrability_sweep(H, {-1.0}, hs), SpecError);
}

TEST_CASE("bounded Hessian on fine levels is classified convergent") {
  // Levels close to the grid scale keep the shrunk domain almost constant.
  const auto u = sampled(ConvexDomain::box({{-1, 1}, {0, 2}}), 1025, [](const Point& x) { return 0.5 * dot(x, x); });
  const auto H = hessian_field(u);
  const auto rep = integrability_sweep(H, {0.5, 1.0, 2.0}, {0.0234375, 0.015625, 0.01171875, 0.0078125});
  for (auto c : rep.classification) CHECK(c == Integrability::convergent);
  CHECK(rep.delta_star_status == "above_range");
  CHECK(std::isnan(rep.delta_star));
}

TEST_CASE("slicing exponents and thresholds") {
  CHECK(slicing_exponent_a(2) == doctest::Approx(0.5));
  CHECK(slicing_exponent_a(3) == doctest::Approx(0.75));
  CHECK(slicing_threshold(2, 1.0, std::exp(-1.0)) == doctest::Approx(2.0 * std::exp(-1.0)));
  CHECK(slicing_bound(2, 1.0, 1.0, std::exp(-1.0)) == doctest::Approx(0.5 * std::exp(1.0)));
}

TEST_CASE("slicing set of a function flat along x1") {
  const auto u = sampled(ConvexDomain::box({{-1, 1}, {0, 2}}), 129, [](const Point& x) { return 0.5 * x[1] * x[1] - x[1]; });
  const auto H = hessian_field(u);
  const auto S = slicing_suite(u, H, 1.0, {0.125, 0.25});
  REQUIRE(S.slices.size() == 2);
  CHECK(S.C1 == doctest::Approx(4.0 * S.C0));
  for (const auto& s : S.slices) {
    CHECK(s.fraction == doctest::Approx(1.0));
    CHECK(s.min_dnn == doctest::Approx(1.0));
  }
  const auto v = sampled(ConvexDomain::ball({0, 0, 0}, 1, 2), 33, [](const Point& x) { return dot(x, x); });
  CHECK_THROWS_AS(slicing_suite(v, hessian_field(v), 1.0, {0.25}), GeometryError);
}

TEST_CASE("growth suite on a solved box") {
  const auto u = solved_box(129);
  const auto H = hessian_field(u);
  const auto rep = growth_suite(u, H);
  REQUIRE(rep.flat.has_value());
  REQUIRE(rep.find("flat_u") != nullptr);
  // Near the flat face |u| grows more slowly than linearly and D^2 u blows up.
  CHECK(rep.find("flat_u")->fit.exponent < 1.0);
  CHECK(rep.find("flat_hessian")->fit.exponent < 0.0);
  CHECK(rep.M1 == doctest::Approx(u.sup_abs()));
  CHECK(rep.find("nope") == nullptr);

  SUBCASE("degenerate suite with s = 0 reproduces the flat fits") {
    const auto d = degenerate_exponent_suite(u, H, 0.0, 1.0, 1.0);
    CHECK(d.u_fit.fit.exponent == doctest::Approx(rep.find("flat_u")->fit.exponent).epsilon(1e-12));
    CHECK(d.dnn_fit.fit.exponent == doctest::Approx(rep.find("flat_dnn")->fit.exponent).epsilon(1e-12));
  }
  SUBCASE("Pogorelov levels on the box") {
    const auto P = pogorelov_suite(u, H, dyadic_levels(rep.M1, 4));
    REQUIRE(P.levels.size() == 4);
    CHECK(P.nested);
    for (const auto& L : P.levels) CHECK(L.inclusion);
    CHECK(P.ratio_spread >= 1.0);
    CHECK_THROWS_AS(pogorelov_suite(u, H, {rep.M1}), SpecError);
  }
}

TEST_CASE("Pogorelov quantities on the disc") {
  const auto u = sampled(ConvexDomain::ball({0, 0, 0}, 1, 2), 65, [](const Point& x) { return 0.5 * (dot(x, x) - 1); });
  const auto H = hessian_field(u);
  const auto P = pogorelov_suite(u, H, dyadic_levels(0.5, 3));
  REQUIRE(P.levels.size() == 3);
  double top = 0.0;
  for (const auto& L : P.levels) top = std::max(top, L.h);
  CHECK(top == doctest::Approx(0.25));
  for (const auto& L : P.levels) {
    // |u + h| <= 1/2 - h, |D^2 u| = 1 and |Du|^2 <= 1.
    CHECK(L.ratio <= 0.25 + 1e-12);
    CHECK(L.inclusion);
  }
  CHECK(P.pass);
}
