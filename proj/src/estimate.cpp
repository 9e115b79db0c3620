#include "masharp/estimate.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <map>
#include <sstream>

#include "masharp/error.hpp"

namespace masharp {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Ols {
  double slope = 0.0, intercept = 0.0, band = 0.0, r2 = 0.0;
};

// Ordinary least squares with a 95% confidence half-width on the slope.
Ols ols(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  Ols r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double e = y[i] - r.intercept - r.slope * x[i];
    ssr += e * e;
  }
  r.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  if (m > 2) {
    const boost::math::students_t dist(static_cast<double>(m - 2));
    const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
    r.band = t * std::sqrt(ssr / static_cast<double>(m - 2) / sxx);
  }
  return r;
}

ExponentCheck make_check(const std::string& name, const std::vector<double>& d, const std::vector<double>& v,
                         double reference, const std::optional<Interval>& band) {
  ExponentCheck c;
  c.name = name;
  c.fit = fit_growth_exponent(d, v);
  c.reference = reference;
  c.band = band;
  c.pass = !band || band->contains(c.fit.exponent);
  return c;
}

const ConvexDomain& require_box(const Grid& g) {
  if (g.domain().kind() != ConvexDomain::Kind::box) throw GeometryError("this analysis needs a box domain");
  return g.domain();
}

}  // namespace

GrowthFit fit_growth_exponent(const std::vector<double>& distance, const std::vector<double>& value) {
  if (distance.size() != value.size()) throw FitError("distance and value lists differ in length");
  if (distance.size() < 6) throw FitError("an exponent fit needs at least 6 samples");
  double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < distance.size(); ++i) {
    if (!(distance[i] > 0.0) || !(value[i] > 0.0) || !std::isfinite(distance[i]) || !std::isfinite(value[i]))
      throw FitError("exponent fits need positive finite distances and values");
    dmin = std::min(dmin, distance[i]);
    dmax = std::max(dmax, distance[i]);
    lx.push_back(std::log(distance[i]));
    ly.push_back(std::log(value[i]));
  }
  if (dmax < 4.0 * dmin) throw FitError("distance spread max/min below 4: ill-conditioned fit");
  const Ols r = ols(lx, ly);
  GrowthFit f;
  f.exponent = r.slope;
  f.band = r.band;
  f.r2 = r.r2;
  f.intercept = r.intercept;
  f.distance = distance;
  f.value = value;
  return f;
}

const ExponentCheck* GrowthReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

BandTable flat_face_table(const GridField& u, const HessianField& H, double inner_factor) {
  const Grid& g = *u.grid;
  const auto& box = require_box(g);
  const int n = g.dim();
  const int ax = n - 1;
  const double h = g.spacing();
  const auto& iv = box.intervals();
  double outer = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) outer = std::min(outer, 0.25 * (iv[i].second - iv[i].first));
  const double inner = inner_factor * h;

  struct Row {
    int count = 0;
    double u = 0.0, grad = 0.0, hess = 0.0, dnn = -std::numeric_limits<double>::infinity();
  };
  std::map<long, Row> rows;
  const double tol = 1e-9 * h;
  for (std::size_t k = 0; k < H.nodes.size(); ++k) {
    const int node = H.nodes[k];
    const Point x = g.coords(node);
    bool inside = true;
    for (int i = 0; i < ax && inside; ++i) {
      const double c = 0.5 * (iv[i].first + iv[i].second);
      inside = std::abs(x[i] - c) <= 0.5 * h + tol;
    }
    const double d = x[ax] - iv[ax].first;
    if (!inside || d < inner - tol || d > outer + tol) continue;
    const long j = std::lround((x[ax] - g.origin()[ax]) / h);
    Row& r = rows[j];
    ++r.count;
    r.u = std::max(r.u, std::abs(u.values[node]));
    r.grad = std::max(r.grad, norm(H.gradient[k]));
    r.hess = std::max(r.hess, H.spectral_norm[k]);
    r.dnn = std::max(r.dnn, H.matrix[k][3 * ax + ax]);
  }
  BandTable t;
  for (const auto& [j, r] : rows) {
    const double d = g.origin()[ax] + h * static_cast<double>(j) - iv[ax].first;
    t.lo.push_back(d);
    t.hi.push_back(d);
    t.distance.push_back(d);
    t.count.push_back(r.count);
    t.sup_u.push_back(r.u);
    t.sup_grad.push_back(r.grad);
    t.sup_hessian.push_back(r.hess);
    t.max_dnn.push_back(r.dnn);
  }
  return t;
}

GrowthReport growth_suite(const GridField& u, const HessianField& H, const GrowthOptions& options) {
  const Grid& g = *u.grid;
  const auto& domain = g.domain();
  const int n = g.dim();
  const double h = g.spacing();
  const auto& dist = g.node_distance();
  GrowthReport rep;
  rep.M1 = u.sup_abs();
  rep.diameter = domain.diameter();
  rep.alpha = n == 2 ? 2.0 / (1.0 + options.gamma) : 2.0 / n;

  // Pointwise diagnostics.
  rep.lower_sandwich_min = std::numeric_limits<double>::infinity();
  for (int node : g.interior_nodes()) {
    const double d = dist[node];
    const double a = std::abs(u.values[node]);
    rep.C_alpha = std::max(rep.C_alpha, a / std::pow(d, rep.alpha));
    rep.C_log = std::max(rep.C_log, a / (d * (1.0 + std::abs(std::log(d)))));
    const double lower = d * rep.M1 / rep.diameter;
    rep.lower_sandwich_min = std::min(rep.lower_sandwich_min, a / lower);
    if (a < lower - 1e-9 * rep.M1) ++rep.lower_sandwich_violations;
  }
  for (std::size_t k = 0; k < H.nodes.size(); ++k) {
    const int node = H.nodes[k];
    rep.gradient_ratio_max =
        std::max(rep.gradient_ratio_max, norm(H.gradient[k]) * dist[node] / std::abs(u.values[node]));
  }

  // Geometric distance bands.
  const double inner = options.inner_factor * h;
  double dmax = 0.0;
  for (int node : g.interior_nodes()) dmax = std::max(dmax, dist[node]);
  std::vector<double> edges{inner};
  while (edges.back() * options.band_ratio <= dmax * (1.0 + 1e-12)) edges.push_back(edges.back() * options.band_ratio);
  const int nb = static_cast<int>(edges.size()) - 1;
  std::vector<int> count(std::max(nb, 0), 0);
  std::vector<double> su(count.size(), 0.0), sg(count.size(), 0.0), sh(count.size(), 0.0);
  for (int node : g.interior_nodes()) {
    const double d = dist[node];
    if (d < inner || nb <= 0 || d >= edges.back()) continue;
    const int b = static_cast<int>(std::upper_bound(edges.begin(), edges.end(), d) - edges.begin()) - 1;
    ++count[b];
    su[b] = std::max(su[b], std::abs(u.values[node]));
    const int slot = H.slot[node];
    if (slot >= 0) {
      sg[b] = std::max(sg[b], norm(H.gradient[slot]));
      sh[b] = std::max(sh[b], H.spectral_norm[slot]);
    }
  }
  for (int b = 0; b < nb; ++b) {
    if (count[b] == 0) continue;
    rep.bands.lo.push_back(edges[b]);
    rep.bands.hi.push_back(edges[b + 1]);
    rep.bands.distance.push_back(std::sqrt(edges[b] * edges[b + 1]));
    rep.bands.count.push_back(count[b]);
    rep.bands.sup_u.push_back(su[b]);
    rep.bands.sup_grad.push_back(sg[b]);
    rep.bands.sup_hessian.push_back(sh[b]);
    rep.bands.max_dnn.push_back(kNaN);
  }
  if (rep.bands.distance.size() < 6)
    throw ResolutionError("fewer than 6 populated distance bands above 4 grid spacings");
  const auto& B = rep.bands;
  rep.checks.push_back(make_check("u", B.distance, B.sup_u, 1.0, options.u_band));
  rep.checks.push_back(make_check("grad", B.distance, B.sup_grad, 0.0, options.grad_band));
  rep.checks.push_back(make_check("hessian", B.distance, B.sup_hessian, kNaN, options.hessian_band));

  if (domain.kind() == ConvexDomain::Kind::box) {
    rep.flat = flat_face_table(u, H, options.inner_factor);
    const auto& F = *rep.flat;
    if (F.distance.size() < 6) throw ResolutionError("fewer than 6 grid rows above the flat face");
    const double u_ref = n == 2 ? 1.0 : 2.0 / n;
    rep.checks.push_back(make_check("flat_u", F.distance, F.sup_u, u_ref, options.flat_u_band));
    rep.checks.push_back(make_check("flat_grad", F.distance, F.sup_grad, u_ref - 1.0, std::nullopt));
    rep.checks.push_back(make_check("flat_hessian", F.distance, F.sup_hessian, u_ref - 2.0, options.flat_hessian_band));
    rep.checks.push_back(make_check("flat_dnn", F.distance, F.max_dnn, u_ref - 2.0, options.flat_dnn_band));
  }
  rep.pass = rep.lower_sandwich_violations == 0;
  for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
  return rep;
}

std::vector<double> dyadic_levels(double M1, int levels) {
  std::vector<double> out;
  double h = 0.5 * M1;
  for (int k = 0; k < levels; ++k, h *= 0.5) out.push_back(h);
  return out;
}

PogorelovReport pogorelov_suite(const GridField& u, const HessianField& H, std::vector<double> h_list,
                                double spread_limit) {
  const Grid& g = *u.grid;
  PogorelovReport rep;
  rep.M1 = u.sup_abs();
  rep.diameter = g.domain().diameter();
  rep.spread_limit = spread_limit;
  if (h_list.empty()) throw SpecError("Pogorelov suite needs at least one level");
  const double lo = 4.0 * g.spacing() * rep.M1 / rep.diameter;
  const double hi = 0.5 * rep.M1;
  for (double h : h_list)
    if (h < lo * (1.0 - 1e-12) || h > hi * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "Pogorelov level " << h << " outside [" << lo << ", " << hi << "]";
      throw SpecError(os.str());
    }
  std::sort(h_list.begin(), h_list.end());

  const auto& dist = g.node_distance();
  const auto& interior = g.interior_nodes();
  std::vector<char> prev_a, prev_omega;
  rep.nested = true;
  for (double h : h_list) {
    PogorelovLevel L;
    L.h = h;
    L.shrink_distance = rep.diameter * h / rep.M1;
    L.inclusion = true;
    std::vector<char> in_a(interior.size()), in_omega(interior.size());
    double P = 0.0, grad2 = 0.0;
    for (std::size_t k = 0; k < interior.size(); ++k) {
      const int node = interior[k];
      const double v = u.values[node];
      in_a[k] = v < -h;
      in_omega[k] = dist[node] > L.shrink_distance;
      if (in_omega[k] && !in_a[k]) L.inclusion = false;
      if (!in_a[k]) continue;
      ++L.sublevel_nodes;
      const int slot = H.slot[node];
      if (slot < 0) continue;
      ++L.eligible_nodes;
      P = std::max(P, std::abs(v + h) * H.spectral_norm[slot]);
      grad2 = std::max(grad2, dot(H.gradient[slot], H.gradient[slot]));
    }
    if (L.sublevel_nodes == 0) {
      std::ostringstream os;
      os << "sublevel set {u < -" << h << "} is empty";
      throw ResolutionError(os.str());
    }
    if (!prev_a.empty())
      for (std::size_t k = 0; k < interior.size(); ++k)
        if ((in_a[k] && !prev_a[k]) || (in_omega[k] && !prev_omega[k])) rep.nested = false;
    prev_a = std::move(in_a);
    prev_omega = std::move(in_omega);
    L.P = P;
    L.G = 1.0 + grad2;
    L.ratio = P / L.G;
    rep.levels.push_back(L);
  }
  double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
  bool inclusion = true;
  for (const auto& L : rep.levels) {
    rmin = std::min(rmin, L.ratio);
    rmax = std::max(rmax, L.ratio);
    inclusion = inclusion && L.inclusion;
  }
  rep.ratio_spread = rmin > 0.0 ? rmax / rmin : std::numeric_limits<double>::infinity();
  rep.pass = inclusion && rep.nested && rep.ratio_spread <= spread_limit;
  return rep;
}

const char* to_string(Integrability c) {
  switch (c) {
    case Integrability::convergent: return "convergent";
    case Integrability::divergent: return "divergent";
    default: return "inconclusive";
  }
}

namespace {

// First upward crossing of `level` by the piecewise-linear curve (x, y).
std::optional<double> upward_crossing(const std::vector<double>& x, const std::vector<double>& y, double level) {
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = y[i] - level, b = y[i + 1] - level;
    if (a <= 0.0 && b > 0.0) return x[i] + (x[i + 1] - x[i]) * (-a) / (b - a);
  }
  return std::nullopt;
}

}  // namespace

IntegrabilityReport integrability_sweep(const HessianField& H, const std::vector<double>& delta_list,
                                        const std::vector<double>& h_list) {
  const Grid& g = *H.grid;
  const int n = g.dim();
  const double hg = g.spacing();
  const auto& dist = g.node_distance();
  IntegrabilityReport rep;
  for (double d : delta_list)
    if (!(d > 0.0)) throw SpecError("delta values must be positive");
  rep.delta = delta_list;
  std::sort(rep.delta.begin(), rep.delta.end());
  rep.delta.erase(std::unique(rep.delta.begin(), rep.delta.end()), rep.delta.end());
  if (rep.delta.empty()) throw SpecError("integrability sweep needs at least one delta");

  std::vector<double> hs = h_list;
  std::sort(hs.begin(), hs.end(), std::greater<>());
  hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
  for (double h : hs) {
    if (!(h > 0.0)) throw SpecError("integrability levels must be positive");
    if (h < 4.0 * hg * (1.0 - 1e-12)) continue;
    bool populated = false;
    for (int node : H.nodes)
      if (dist[node] > h) {
        populated = true;
        break;
      }
    if (populated) rep.h.push_back(h);
  }
  if (rep.h.size() < 4) throw ResolutionError("fewer than 4 usable integrability levels (need h >= 4 h_grid)");

  const double cell = std::pow(hg, n);
  rep.I.assign(rep.delta.size(), std::vector<double>(rep.h.size(), 0.0));
  for (std::size_t di = 0; di < rep.delta.size(); ++di) {
    for (std::size_t hi = 0; hi < rep.h.size(); ++hi) {
      double sum = 0.0;
      for (std::size_t k = 0; k < H.nodes.size(); ++k)
        if (dist[H.nodes[k]] > rep.h[hi]) sum += std::pow(H.spectral_norm[k], rep.delta[di]);
      rep.I[di][hi] = cell * sum;
    }
  }
  std::vector<double> lx;
  for (double h : rep.h) lx.push_back(std::log(1.0 / h));
  for (std::size_t di = 0; di < rep.delta.size(); ++di) {
    std::vector<double> ly;
    for (double v : rep.I[di]) ly.push_back(std::log(v));
    const Ols r = ols(lx, ly);
    rep.beta.push_back(r.slope);
    rep.beta_band.push_back(r.band);
    rep.classification.push_back(r.slope < rep.beta_threshold ? Integrability::convergent
                                 : r.slope > 0.2             ? Integrability::divergent
                                                             : Integrability::inconclusive);
  }

  rep.monotone = true;
  for (std::size_t i = 0; i + 1 < rep.beta.size(); ++i)
    if (rep.beta[i + 1] < rep.beta[i] - (rep.beta_band[i] + rep.beta_band[i + 1])) rep.monotone = false;

  if (rep.beta.front() > rep.beta_threshold) {
    rep.delta_star_status = "below_range";
  } else if (auto c = upward_crossing(rep.delta, rep.beta, rep.beta_threshold)) {
    rep.delta_star_status = "crossing";
    rep.delta_star = *c;
    std::vector<double> up, down;
    for (std::size_t i = 0; i < rep.beta.size(); ++i) {
      up.push_back(rep.beta[i] + rep.beta_band[i]);
      down.push_back(rep.beta[i] - rep.beta_band[i]);
    }
    const auto c_up = upward_crossing(rep.delta, up, rep.beta_threshold);
    const auto c_down = upward_crossing(rep.delta, down, rep.beta_threshold);
    if (c_up && c_down) rep.delta_star_band = 0.5 * std::abs(*c_down - *c_up);
  } else {
    rep.delta_star_status = "above_range";
  }
  return rep;
}

double slicing_exponent_a(int n) { return (0.5 + n - 2.0) / (n - 1.0); }

double slicing_threshold(int n, double C1, double x) {
  const double w = n == 2 ? x * std::abs(std::log(x)) : std::pow(x, 2.0 / n);
  return C1 * w / (1.0 - slicing_exponent_a(n));
}

double slicing_bound(int n, double lambda, double C1, double x) {
  const double w = n == 2 ? x * std::abs(std::log(x)) : std::pow(x, 2.0 / n);
  const double a = slicing_exponent_a(n);
  return lambda * std::pow(1.0 - a, n - 1) * std::pow(C1, 1 - n) * std::pow(w, 1 - n);
}

SlicingSuite slicing_suite(const GridField& u, const HessianField& H, double lambda,
                           const std::vector<double>& xn_list) {
  const Grid& g = *u.grid;
  const auto& box = require_box(g);
  const int n = g.dim();
  const int ax = n - 1;
  const double h = g.spacing();
  const auto& iv = box.intervals();
  SlicingSuite S;
  double jac = 1.0;
  for (int i = 0; i < n; ++i) {
    S.scale[i] = 2.0 / (iv[i].second - iv[i].first);
    jac *= S.scale[i] * S.scale[i];
  }
  S.lambda = lambda / jac;
  S.a = slicing_exponent_a(n);
  S.alpha = n == 2 ? 1.0 : 2.0 / n;
  if (xn_list.empty()) throw SpecError("slicing needs at least one height");
  const double hn = h * S.scale[ax];  // normalized spacing along the last axis
  auto normalized = [&](const Point& x, int i) {
    return i == ax ? S.scale[i] * (x[i] - iv[i].first) : S.scale[i] * (x[i] - iv[i].first) - 1.0;
  };
  auto weight = [&](double x) { return n == 2 ? x * std::abs(std::log(x)) : std::pow(x, S.alpha); };

  struct SliceNode {
    int slot;
    double w;  // trapezoid weight
  };
  std::vector<std::vector<SliceNode>> slices;
  for (double xn : xn_list) {
    if (!(xn > 4.0 * hn && xn < 0.5)) {
      std::ostringstream os;
      os << "slicing height " << xn << " outside (4 h_grid, 1/2) = (" << 4.0 * hn << ", 0.5)";
      throw SpecError(os.str());
    }
    SlicingReport r;
    r.xn = xn;
    r.alpha = S.alpha;
    const long j = std::lround((iv[ax].first + xn / S.scale[ax] - g.origin()[ax]) / h);
    const double row_coord = g.origin()[ax] + h * static_cast<double>(j);
    r.row = S.scale[ax] * (row_coord - iv[ax].first);
    std::vector<SliceNode> nodes;
    const double tol = 1e-9;
    for (std::size_t k = 0; k < H.nodes.size(); ++k) {
      const Point x = g.coords(H.nodes[k]);
      if (std::abs(x[ax] - row_coord) > 0.5 * h) continue;
      double w = 1.0;
      bool in_q = true;
      for (int i = 0; i < ax && in_q; ++i) {
        const double y = normalized(x, i);
        if (std::abs(y) > 0.5 + tol) in_q = false;
        else if (std::abs(std::abs(y) - 0.5) <= tol) w *= 0.5;
      }
      if (in_q) nodes.push_back({static_cast<int>(k), w});
    }
    if (nodes.empty()) {
      std::ostringstream os;
      os << "slice at height " << xn << " has no eligible Hessian nodes";
      throw ResolutionError(os.str());
    }
    r.slice_nodes = static_cast<int>(nodes.size());
    r.weight = weight(r.row);
    for (const auto& sn : nodes) S.C0 = std::max(S.C0, std::abs(u.values[H.nodes[sn.slot]]) / r.weight);
    S.slices.push_back(r);
    slices.push_back(std::move(nodes));
  }
  S.C1 = 4.0 * S.C0;
  S.pass = true;
  for (std::size_t si = 0; si < S.slices.size(); ++si) {
    SlicingReport& r = S.slices[si];
    r.threshold = slicing_threshold(n, S.C1, r.row);
    r.bound = slicing_bound(n, S.lambda, S.C1, r.row);
    double total = 0.0, in_set = 0.0;
    std::vector<double> dnn;
    for (const auto& sn : slices[si]) {
      const SymMatrix& m = H.matrix[sn.slot];
      total += sn.w;
      bool member = true;
      double tangential = 1.0;
      for (int i = 0; i < ax; ++i) {
        const double dii = m[3 * i + i] / (S.scale[i] * S.scale[i]);
        tangential *= dii;
        if (!(dii < r.threshold)) member = false;
      }
      if (!member) continue;
      in_set += sn.w;
      const double d = m[3 * ax + ax] / (S.scale[ax] * S.scale[ax]);
      dnn.push_back(d);
      const double prod = tangential * d;
      const double det = H.det[sn.slot] / jac;
      const double rel = 1e-8 * std::abs(prod);
      if (S.lambda > prod + rel || det > prod + rel) ++r.soundness_violations;
    }
    r.set_nodes = static_cast<int>(dnn.size());
    r.fraction = total > 0.0 ? in_set / total : 0.0;
    if (!dnn.empty()) {
      std::sort(dnn.begin(), dnn.end());
      r.min_dnn = dnn.front();
      const std::size_t mid = dnn.size() / 2;
      r.median_dnn = dnn.size() % 2 ? dnn[mid] : 0.5 * (dnn[mid - 1] + dnn[mid]);
    }
    r.pass = r.fraction >= 0.5 && !dnn.empty() && r.min_dnn >= r.bound;
    S.pass = S.pass && r.pass;
  }
  return S;
}

DegenerateReport degenerate_exponent_suite(const GridField& u, const HessianField& H, double s, double mu1,
                                           double mu2, const DegenerateOptions& options) {
  const int n = u.grid->dim();
  DegenerateReport rep;
  rep.s = s;
  rep.mu1 = mu1;
  rep.mu2 = mu2;
  rep.flat = flat_face_table(u, H, options.inner_factor);
  if (rep.flat.distance.size() < 6) throw ResolutionError("fewer than 6 grid rows above the flat face");
  const double ns = n - s;
  double u_ref, dnn_ref;
  if (s == 0.0) {
    u_ref = n == 2 ? 1.0 : 2.0 / n;
    dnn_ref = u_ref - 2.0;
  } else if (s < 0.0) {
    u_ref = 2.0 / ns;
    dnn_ref = (2.0 - 2.0 * ns) / ns;
  } else {
    u_ref = 2.0 / ns;
    dnn_ref = s * mu2 - (n - 1) * mu1;
  }
  std::optional<Interval> u_band = options.u_band;
  if (s > 0.0 && !u_band) u_band = Interval{mu1, mu2};
  rep.u_fit = make_check("flat_u", rep.flat.distance, rep.flat.sup_u, u_ref, u_band);
  rep.dnn_fit = make_check("flat_dnn", rep.flat.distance, rep.flat.max_dnn, dnn_ref, options.dnn_band);
  rep.implied_threshold = ns / (2.0 * ns - 2.0);
  rep.pass = rep.u_fit.pass && rep.dnn_fit.pass;
  return rep;
}

}  // namespace masharp
