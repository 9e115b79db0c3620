#include "masharp/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace masharp {

using nlohmann::json;

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

json interval(const std::optional<Interval>& b) {
  if (!b) return nullptr;
  return json::array({num(b->lo), num(b->hi)});
}

json point(const Point& p, int dim) {
  json a = json::array();
  for (int i = 0; i < dim; ++i) a.push_back(p[i]);
  return a;
}

void row(std::ostringstream& os, std::initializer_list<double> cells) {
  bool first = true;
  for (double c : cells) {
    if (!first) os << ',';
    os << format_number(c);
    first = false;
  }
  os << '\n';
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json to_json(const GrowthFit& f) {
  return {{"exponent", num(f.exponent)}, {"band", num(f.band)},  {"r2", num(f.r2)},
          {"intercept", num(f.intercept)}, {"points", f.distance.size()}};
}

json to_json(const ExponentCheck& c) {
  json j = to_json(c.fit);
  j["name"] = c.name;
  j["reference"] = num(c.reference);
  j["acceptance"] = interval(c.band);
  j["pass"] = c.pass;
  return j;
}

json to_json(const BandTable& t) {
  return {{"lo", nums(t.lo)},       {"hi", nums(t.hi)},          {"distance", nums(t.distance)},
          {"count", t.count},       {"sup_u", nums(t.sup_u)},    {"sup_grad", nums(t.sup_grad)},
          {"sup_hessian", nums(t.sup_hessian)}, {"max_dnn", nums(t.max_dnn)}};
}

json to_json(const GrowthReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  json j{{"M1", num(r.M1)},
         {"diameter", num(r.diameter)},
         {"alpha", num(r.alpha)},
         {"C_alpha", num(r.C_alpha)},
         {"C_log", num(r.C_log)},
         {"lower_sandwich_min", num(r.lower_sandwich_min)},
         {"lower_sandwich_violations", r.lower_sandwich_violations},
         {"gradient_ratio_max", num(r.gradient_ratio_max)},
         {"bands", to_json(r.bands)},
         {"fits", checks},
         {"pass", r.pass}};
  j["flat_face"] = r.flat ? to_json(*r.flat) : json(nullptr);
  return j;
}

json to_json(const PogorelovReport& r) {
  json levels = json::array();
  for (const auto& L : r.levels)
    levels.push_back({{"h", num(L.h)},
                      {"sublevel_nodes", L.sublevel_nodes},
                      {"eligible_nodes", L.eligible_nodes},
                      {"P", num(L.P)},
                      {"G", num(L.G)},
                      {"ratio", num(L.ratio)},
                      {"shrink_distance", num(L.shrink_distance)},
                      {"inclusion", L.inclusion}});
  return {{"M1", num(r.M1)},         {"diameter", num(r.diameter)}, {"levels", levels},
          {"ratio_spread", num(r.ratio_spread)}, {"spread_limit", num(r.spread_limit)},
          {"nested", r.nested},      {"pass", r.pass}};
}

json to_json(const IntegrabilityReport& r) {
  json table = json::array();
  for (const auto& row : r.I) table.push_back(nums(row));
  json cls = json::array();
  for (auto c : r.classification) cls.push_back(to_string(c));
  return {{"delta", nums(r.delta)},
          {"h", nums(r.h)},
          {"I", table},
          {"beta", nums(r.beta)},
          {"beta_band", nums(r.beta_band)},
          {"classification", cls},
          {"beta_threshold", num(r.beta_threshold)},
          {"delta_star", num(r.delta_star)},
          {"delta_star_band", num(r.delta_star_band)},
          {"delta_star_status", r.delta_star_status},
          {"monotone", r.monotone}};
}

json to_json(const SlicingSuite& r) {
  json slices = json::array();
  for (const auto& s : r.slices)
    slices.push_back({{"xn", num(s.xn)},
                      {"row", num(s.row)},
                      {"alpha", num(s.alpha)},
                      {"weight", num(s.weight)},
                      {"threshold", num(s.threshold)},
                      {"slice_nodes", s.slice_nodes},
                      {"set_nodes", s.set_nodes},
                      {"fraction", num(s.fraction)},
                      {"min_dnn", num(s.min_dnn)},
                      {"median_dnn", num(s.median_dnn)},
                      {"bound", num(s.bound)},
                      {"soundness_violations", s.soundness_violations},
                      {"pass", s.pass}});
  return {{"lambda", num(r.lambda)}, {"C0", num(r.C0)}, {"C1", num(r.C1)},    {"a", num(r.a)},
          {"alpha", num(r.alpha)},   {"scale", nums({r.scale.begin(), r.scale.end()})},
          {"slices", slices},        {"pass", r.pass}};
}

json to_json(const DegenerateReport& r) {
  return {{"s", num(r.s)},
          {"mu1", num(r.mu1)},
          {"mu2", num(r.mu2)},
          {"u_fit", to_json(r.u_fit)},
          {"dnn_fit", to_json(r.dnn_fit)},
          {"implied_threshold", num(r.implied_threshold)},
          {"flat_face", to_json(r.flat)},
          {"pass", r.pass}};
}

json to_json(const HadamardReport& r, const Grid& grid) {
  auto node = [&](const HadamardNode& n) -> json {
    if (n.node < 0) return nullptr;
    return {{"x", point(grid.coords(n.node), grid.dim())},
            {"det", num(n.det)},
            {"diag_product", num(n.diag_product)},
            {"f", num(n.f)}};
  };
  return {{"pass", r.pass},
          {"tolerance", num(r.tolerance)},
          {"checked", r.checked},
          {"violations", r.violations},
          {"worst_excess", num(r.worst_excess)},
          {"worst", node(r.worst)},
          {"max_relative_residual", num(r.max_relative_residual)},
          {"worst_residual", node(r.worst_residual)},
          {"residual_distance", num(r.residual_distance)},
          {"max_relative_residual_far", num(r.max_relative_residual_far)},
          {"median_relative_residual_far", num(r.median_relative_residual_far)},
          {"far_nodes", r.far_nodes}};
}

json to_json(const SolveReport& r) {
  return {{"converged", r.converged},
          {"newton_iterations", r.newton_iterations},
          {"residual", num(r.residual)},
          {"outer_iterations", r.outer_iterations},
          {"u_min", num(r.u_min)},
          {"u_max", num(r.u_max)},
          {"min_second_difference", num(r.min_second_difference)}};
}

json to_json(const Constants& c) {
  return {{"M1", num(c.M1)}, {"M2", num(c.M2)}, {"volume_ratio", num(c.volume_ratio)},
          {"C0", num(c.C0)}, {"C1", num(c.C1)}, {"a", num(c.a)},
          {"gamma", num(c.gamma)}, {"alpha", num(c.alpha)}};
}

std::string solution_csv(const GridField& u) {
  const Grid& g = *u.grid;
  const int n = g.dim();
  std::ostringstream os;
  os << (n == 2 ? "# x1,x2,u\n" : "# x1,x2,x3,u\n");
  for (int node = 0; node < g.node_count(); ++node) {
    if (g.kind(node) == NodeKind::exterior) continue;
    const Point x = g.coords(node);
    if (n == 2) row(os, {x[0], x[1], u.values[node]});
    else row(os, {x[0], x[1], x[2], u.values[node]});
  }
  return os.str();
}

std::string hessian_csv(const HessianField& H) {
  const Grid& g = *H.grid;
  const int n = g.dim();
  std::ostringstream os;
  os << (n == 2 ? "# x1,x2,dist,D11,D22,D12,spectral_norm,det\n"
                : "# x1,x2,x3,dist,D11,D22,D33,D12,D13,D23,spectral_norm,det\n");
  const auto& dist = g.node_distance();
  for (std::size_t k = 0; k < H.nodes.size(); ++k) {
    const Point x = g.coords(H.nodes[k]);
    const auto& m = H.matrix[k];
    if (n == 2)
      row(os, {x[0], x[1], dist[H.nodes[k]], m[0], m[4], m[1], H.spectral_norm[k], H.det[k]});
    else
      row(os, {x[0], x[1], x[2], dist[H.nodes[k]], m[0], m[4], m[8], m[1], m[2], m[5], H.spectral_norm[k], H.det[k]});
  }
  return os.str();
}

std::string band_table_csv(const BandTable& t) {
  std::ostringstream os;
  os << "# lo,hi,distance,count,sup_u,sup_grad,sup_hessian,max_dnn\n";
  for (std::size_t i = 0; i < t.distance.size(); ++i)
    row(os, {t.lo[i], t.hi[i], t.distance[i], static_cast<double>(t.count[i]), t.sup_u[i], t.sup_grad[i],
             t.sup_hessian[i], t.max_dnn[i]});
  return os.str();
}

std::string growth_fits_csv(const std::vector<ExponentCheck>& checks) {
  std::ostringstream os;
  os << "# index,exponent,band,r2,points,reference,accept_lo,accept_hi,pass\n";
  os << "# index:";
  for (std::size_t i = 0; i < checks.size(); ++i) os << ' ' << i << '=' << checks[i].name;
  os << '\n';
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto& c = checks[i];
    row(os, {static_cast<double>(i), c.fit.exponent, c.fit.band, c.fit.r2, static_cast<double>(c.fit.distance.size()),
             c.reference, c.band ? c.band->lo : nan, c.band ? c.band->hi : nan, c.pass ? 1.0 : 0.0});
  }
  return os.str();
}

std::string integrability_csv(const IntegrabilityReport& r) {
  std::ostringstream os;
  os << "# delta,h,I\n";
  for (std::size_t d = 0; d < r.delta.size(); ++d)
    for (std::size_t k = 0; k < r.h.size(); ++k) row(os, {r.delta[d], r.h[k], r.I[d][k]});
  return os.str();
}

std::string integrability_beta_csv(const IntegrabilityReport& r) {
  std::ostringstream os;
  os << "# delta,beta,beta_band,class (0 convergent, 1 divergent, 2 inconclusive)\n";
  for (std::size_t d = 0; d < r.delta.size(); ++d)
    row(os, {r.delta[d], r.beta[d], r.beta_band[d], static_cast<double>(static_cast<int>(r.classification[d]))});
  return os.str();
}

std::string pogorelov_csv(const PogorelovReport& r) {
  std::ostringstream os;
  os << "# h,sublevel_nodes,eligible_nodes,P,G,ratio,shrink_distance,inclusion\n";
  for (const auto& L : r.levels)
    row(os, {L.h, static_cast<double>(L.sublevel_nodes), static_cast<double>(L.eligible_nodes), L.P, L.G, L.ratio,
             L.shrink_distance, L.inclusion ? 1.0 : 0.0});
  return os.str();
}

std::string slicing_csv(const SlicingSuite& r) {
  std::ostringstream os;
  os << "# xn,row,threshold,slice_nodes,set_nodes,fraction,min_dnn,median_dnn,bound,soundness_violations,pass\n";
  for (const auto& s : r.slices)
    row(os, {s.xn, s.row, s.threshold, static_cast<double>(s.slice_nodes), static_cast<double>(s.set_nodes), s.fraction,
             s.min_dnn, s.median_dnn, s.bound, static_cast<double>(s.soundness_violations), s.pass ? 1.0 : 0.0});
  return os.str();
}

}  // namespace masharp
