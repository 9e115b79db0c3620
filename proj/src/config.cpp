#include "masharp/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "masharp/error.hpp"

namespace masharp {

using nlohmann::json;

const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> names{"convergence", "growth",   "pogorelov",        "integrability",
                                              "slicing",     "hadamard", "degenerate", "oracle_crosscheck"};
  return names;
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [k, v] : j.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
      fail(where, "unknown key \"" + k + "\"");
  }
}

const json& require(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key)) fail(where, std::string("missing required key \"") + key + "\"");
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Interval interval(const json& j, const std::string& where) {
  const auto v = numbers(j, where);
  if (v.size() != 2 || !(v[0] < v[1])) fail(where, "expected [lo, hi] with lo < hi");
  return {v[0], v[1]};
}

Point point(const json& j, const std::string& where, int dim) {
  const auto v = numbers(j, where);
  if (static_cast<int>(v.size()) != dim) fail(where, "expected " + std::to_string(dim) + " coordinates");
  Point p{};
  for (int i = 0; i < dim; ++i) p[i] = v[i];
  return p;
}

ConvexDomain parse_domain(const json& j) {
  const std::string where = "problem.domain";
  if (!j.is_object()) fail(where, "expected an object");
  const json& kind = require(j, where, "kind");
  if (!kind.is_string()) fail(where + ".kind", "expected a string");
  const std::string t = kind.get<std::string>();
  try {
    if (t == "box") {
      allow_keys(j, where, {"kind", "intervals"});
      const json& iv = require(j, where, "intervals");
      if (!iv.is_array()) fail(where + ".intervals", "expected an array of [lo, hi] pairs");
      std::vector<std::pair<double, double>> intervals;
      for (std::size_t i = 0; i < iv.size(); ++i) {
        const auto v = numbers(iv[i], where + ".intervals[" + std::to_string(i) + "]");
        if (v.size() != 2) fail(where + ".intervals", "each interval needs two numbers");
        intervals.emplace_back(v[0], v[1]);
      }
      return ConvexDomain::box(intervals);
    }
    if (t == "ball") {
      allow_keys(j, where, {"kind", "center", "radius"});
      const json& c = require(j, where, "center");
      if (!c.is_array()) fail(where + ".center", "expected an array");
      const int dim = static_cast<int>(c.size());
      return ConvexDomain::ball(point(c, where + ".center", dim), number(require(j, where, "radius"), where + ".radius"),
                                dim);
    }
    if (t == "polytope") {
      allow_keys(j, where, {"kind", "halfspaces"});
      const json& hs = require(j, where, "halfspaces");
      if (!hs.is_array() || hs.empty()) fail(where + ".halfspaces", "expected a nonempty array");
      const int dim = static_cast<int>(require(hs[0], where + ".halfspaces[0]", "normal").size());
      std::vector<HalfSpace> out;
      for (std::size_t i = 0; i < hs.size(); ++i) {
        const std::string w = where + ".halfspaces[" + std::to_string(i) + "]";
        allow_keys(hs[i], w, {"normal", "offset"});
        out.push_back({point(require(hs[i], w, "normal"), w + ".normal", dim),
                       number(require(hs[i], w, "offset"), w + ".offset")});
      }
      return ConvexDomain::polytope(out, dim);
    }
  } catch (const GeometryError& e) {
    fail(where, e.what());
  }
  fail(where + ".kind", "unknown domain kind \"" + t + "\" (box, ball, polytope)");
}

Expression expression(const json& j, const std::string& where) {
  try {
    if (j.is_number()) return Expression::parse(j.dump());
    if (!j.is_string()) fail(where, "expected an expression string");
    return Expression::parse(j.get<std::string>());
  } catch (const ExpressionError& e) {
    fail(where, e.what());
  }
}

void parse_problem(const json& j, ExperimentConfig& cfg) {
  const std::string where = "problem";
  allow_keys(j, where,
             {"domain", "f", "lambda", "Lambda", "s", "gamma", "delta_list", "h_list", "xn_list", "mu1", "mu2", "exact"});
  ProblemSpec& p = cfg.problem;
  p.domain = parse_domain(require(j, where, "domain"));
  if (j.contains("f")) p.f = expression(j["f"], "problem.f");
  if (j.contains("lambda")) p.lambda = number(j["lambda"], "problem.lambda");
  if (j.contains("Lambda")) p.Lambda = number(j["Lambda"], "problem.Lambda");
  if (j.contains("s")) p.s = number(j["s"], "problem.s");
  if (j.contains("gamma")) p.gamma = number(j["gamma"], "problem.gamma");
  if (j.contains("delta_list")) p.delta_list = numbers(j["delta_list"], "problem.delta_list");
  if (j.contains("h_list")) p.h_list = numbers(j["h_list"], "problem.h_list");
  if (j.contains("xn_list")) p.xn_list = numbers(j["xn_list"], "problem.xn_list");
  if (j.contains("mu1")) p.mu1 = number(j["mu1"], "problem.mu1");
  if (j.contains("mu2")) p.mu2 = number(j["mu2"], "problem.mu2");
  if (j.contains("exact")) cfg.exact = expression(j["exact"], "problem.exact");
  try {
    p.validate();
  } catch (const SpecError& e) {
    fail(where, e.what());
  }
}

void parse_solver(const json& j, ExperimentConfig& cfg) {
  const std::string where = "solver";
  allow_keys(j, where,
             {"stencil_width", "newton_tolerance", "max_newton_iters", "damping", "omega", "max_outer_iters",
              "eps_floor", "warm_start"});
  SolverConfig& s = cfg.solver;
  if (j.contains("stencil_width")) s.stencil_width = integer(j["stencil_width"], "solver.stencil_width");
  if (j.contains("newton_tolerance")) s.newton_tolerance = number(j["newton_tolerance"], "solver.newton_tolerance");
  if (j.contains("max_newton_iters")) s.max_newton_iters = integer(j["max_newton_iters"], "solver.max_newton_iters");
  if (j.contains("damping")) s.damping = number(j["damping"], "solver.damping");
  if (j.contains("omega")) s.omega = number(j["omega"], "solver.omega");
  if (j.contains("max_outer_iters")) s.max_outer_iters = integer(j["max_outer_iters"], "solver.max_outer_iters");
  if (j.contains("eps_floor")) s.eps_floor = number(j["eps_floor"], "solver.eps_floor");
  if (j.contains("warm_start")) {
    if (!j["warm_start"].is_boolean()) fail("solver.warm_start", "expected true or false");
    cfg.warm_start = j["warm_start"].get<bool>();
  }
  try {
    s.validate();
  } catch (const SpecError& e) {
    fail(where, e.what());
  }
}

std::optional<Interval> opt_interval(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) return std::nullopt;
  return interval(j[key], where + "." + key);
}

void parse_bands(const json& j, ExperimentConfig& cfg) {
  const std::string where = "bands";
  allow_keys(j, where,
             {"convergence_order_min", "error_floor", "growth", "pogorelov_spread", "pogorelov_levels", "delta_star",
              "convergent_delta", "divergent_delta", "slicing_fraction", "hadamard_residual", "degenerate",
              "max_outer_iters", "oracle_relative"});
  VerdictBands& b = cfg.bands;
  if (j.contains("convergence_order_min"))
    b.convergence_order_min = number(j["convergence_order_min"], "bands.convergence_order_min");
  if (j.contains("error_floor")) b.error_floor = number(j["error_floor"], "bands.error_floor");
  if (j.contains("growth")) {
    const json& g = j["growth"];
    const std::string w = "bands.growth";
    allow_keys(g, w, {"u", "grad", "hessian", "flat_u", "flat_hessian", "flat_dnn", "band_ratio"});
    b.growth.u_band = opt_interval(g, "u", w);
    b.growth.grad_band = opt_interval(g, "grad", w);
    b.growth.hessian_band = opt_interval(g, "hessian", w);
    b.growth.flat_u_band = opt_interval(g, "flat_u", w);
    b.growth.flat_hessian_band = opt_interval(g, "flat_hessian", w);
    b.growth.flat_dnn_band = opt_interval(g, "flat_dnn", w);
    if (g.contains("band_ratio")) {
      b.growth.band_ratio = number(g["band_ratio"], w + ".band_ratio");
      if (!(b.growth.band_ratio > 1.0)) fail(w + ".band_ratio", "must exceed 1");
    }
  }
  if (j.contains("pogorelov_spread")) b.pogorelov_spread = number(j["pogorelov_spread"], "bands.pogorelov_spread");
  if (j.contains("pogorelov_levels")) b.pogorelov_levels = integer(j["pogorelov_levels"], "bands.pogorelov_levels");
  b.delta_star = opt_interval(j, "delta_star", where);
  if (j.contains("convergent_delta")) b.convergent_delta = number(j["convergent_delta"], "bands.convergent_delta");
  if (j.contains("divergent_delta")) b.divergent_delta = number(j["divergent_delta"], "bands.divergent_delta");
  if (j.contains("slicing_fraction")) b.slicing_fraction = number(j["slicing_fraction"], "bands.slicing_fraction");
  if (j.contains("hadamard_residual")) b.hadamard_residual = number(j["hadamard_residual"], "bands.hadamard_residual");
  if (j.contains("degenerate")) {
    const json& d = j["degenerate"];
    const std::string w = "bands.degenerate";
    allow_keys(d, w, {"u", "dnn"});
    b.degenerate.u_band = opt_interval(d, "u", w);
    b.degenerate.dnn_band = opt_interval(d, "dnn", w);
  }
  if (j.contains("max_outer_iters")) b.max_outer_iters = integer(j["max_outer_iters"], "bands.max_outer_iters");
  if (j.contains("oracle_relative")) b.oracle_relative = number(j["oracle_relative"], "bands.oracle_relative");
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: expected a JSON object at top level");
  allow_keys(j, "config", {"name", "claim", "problem", "grid", "solver", "suites", "bands", "output"});

  ExperimentConfig cfg;
  if (j.contains("name")) {
    if (!j["name"].is_string()) fail("name", "expected a string");
    cfg.name = j["name"].get<std::string>();
  }
  if (j.contains("claim")) {
    if (!j["claim"].is_string()) fail("claim", "expected a string");
    cfg.claim = j["claim"].get<std::string>();
  }
  if (!j.contains("problem")) throw ConfigError("config: missing required block \"problem\"");
  parse_problem(j["problem"], cfg);
  const int n = cfg.problem.dim();

  if (!j.contains("grid")) throw ConfigError("config: missing required block \"grid\"");
  const json& g = j["grid"];
  if (!g.is_array() || g.empty()) fail("grid", "expected a nonempty list of nodes-per-axis counts");
  for (std::size_t i = 0; i < g.size(); ++i) {
    const int N = integer(g[i], "grid[" + std::to_string(i) + "]");
    if (N < 9) fail("grid", "node counts must be at least 9");
    if (!cfg.grid.empty() && N <= cfg.grid.back()) fail("grid", "node counts must be strictly increasing");
    cfg.grid.push_back(N);
  }

  cfg.solver = default_solver_config(n);
  if (j.contains("solver")) parse_solver(j["solver"], cfg);

  if (!j.contains("suites")) throw ConfigError("config: missing required block \"suites\"");
  const json& su = j["suites"];
  if (!su.is_array() || su.empty()) fail("suites", "expected a nonempty list");
  std::set<std::string> seen;
  for (const auto& s : su) {
    if (!s.is_string()) fail("suites", "entries must be strings");
    const std::string name = s.get<std::string>();
    const auto& known = known_suites();
    if (std::find(known.begin(), known.end(), name) == known.end()) fail("suites", "unknown suite \"" + name + "\"");
    if (!seen.insert(name).second) fail("suites", "suite \"" + name + "\" listed twice");
    cfg.suites.push_back(name);
  }
  const bool is_box = cfg.problem.domain.kind() == ConvexDomain::Kind::box;
  if (seen.count("slicing") && !is_box) fail("suites", "slicing needs a box domain");
  if (seen.count("slicing") && cfg.problem.xn_list.empty()) fail("suites", "slicing needs problem.xn_list");
  if (seen.count("degenerate") && cfg.problem.s == 0.0) fail("suites", "degenerate needs s != 0");
  if (seen.count("degenerate") && !is_box) fail("suites", "degenerate needs a box domain");
  if (seen.count("integrability") && (cfg.problem.delta_list.empty() || cfg.problem.h_list.empty()))
    fail("suites", "integrability needs problem.delta_list and problem.h_list");
  if (seen.count("convergence") && !cfg.exact) fail("suites", "convergence needs problem.exact");
  if (seen.count("oracle_crosscheck") && n != 2) fail("suites", "oracle_crosscheck is planar only");

  if (j.contains("bands")) parse_bands(j["bands"], cfg);
  cfg.bands.growth.gamma = cfg.problem.gamma;
  for (const auto& [key, value] : {std::pair{"bands.convergent_delta", cfg.bands.convergent_delta},
                                    std::pair{"bands.divergent_delta", cfg.bands.divergent_delta}}) {
    if (!value) continue;
    const auto& dl = cfg.problem.delta_list;
    if (std::none_of(dl.begin(), dl.end(), [&](double d) { return std::abs(d - *value) < 1e-12; }))
      fail(key, "must be one of problem.delta_list");
  }

  if (j.contains("output")) {
    const json& o = j["output"];
    allow_keys(o, "output", {"dir", "formats"});
    if (o.contains("dir")) {
      if (!o["dir"].is_string()) fail("output.dir", "expected a string");
      cfg.output_dir = o["dir"].get<std::string>();
    }
    if (o.contains("formats")) {
      cfg.formats.clear();
      for (const auto& f : o["formats"]) {
        if (!f.is_string() || (f != "csv" && f != "json")) fail("output.formats", "entries must be \"csv\" or \"json\"");
        cfg.formats.push_back(f.get<std::string>());
      }
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

}  // namespace masharp
