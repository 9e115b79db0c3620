#include "masharp/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "masharp/error.hpp"
#include "masharp/estimate.hpp"
#include "masharp/hessian.hpp"
#include "masharp/oracle.hpp"
#include "masharp/report.hpp"
#include "masharp/solver.hpp"

namespace masharp {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(Status s) {
  switch (s) {
    case Status::pass: return "PASS";
    case Status::fail: return "FAIL";
    case Status::inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

std::string RunVerdict::summary() const {
  std::ostringstream os;
  os << "experiment: " << name << '\n';
  if (!claim.empty()) os << "claim: " << claim << '\n';
  for (const auto& v : suites) os << v.suite << ": " << to_string(v.status) << "  " << v.detail << '\n';
  if (!message.empty()) os << "message: " << message << '\n';
  os << "overall: " << (exit_code == exit_success ? "PASS" : "FAIL") << " (exit " << exit_code << ")\n";
  return os.str();
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  fs::rename(tmp, path);
}

std::string resolve_output_dir(const ExperimentConfig& cfg, const std::string& cli_out) {
  if (!cli_out.empty()) return cli_out;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  if (const char* env = std::getenv("MASHARP_OUT"); env && *env) return (fs::path(env) / cfg.name).string();
  return (fs::path("out") / cfg.name).string();
}

namespace {

std::string fmt(double v, int digits = 4) {
  if (!std::isfinite(v)) return format_number(v);
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

std::string fit_text(const ExponentCheck& c) {
  std::string s = c.name + "=" + fmt(c.fit.exponent) + "+-" + fmt(c.fit.band, 2);
  if (c.band) s += " in (" + fmt(c.band->lo) + "," + fmt(c.band->hi) + ")";
  return s;
}

bool has(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

int index_of(const std::vector<double>& v, double x) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (std::abs(v[i] - x) < 1e-12) return static_cast<int>(i);
  return -1;
}

/// Artifact writer honouring the requested formats.
class Artifacts {
 public:
  Artifacts(std::string dir, const std::vector<std::string>& formats)
      : dir_(std::move(dir)), csv_(has(formats, "csv")), json_(has(formats, "json")) {
    fs::create_directories(dir_);
  }
  void csv(const std::string& file, const std::string& content) const {
    if (csv_) write_atomic((fs::path(dir_) / file).string(), content);
  }
  void json_file(const std::string& file, const json& j) const {
    if (json_) write_atomic((fs::path(dir_) / file).string(), j.dump(2) + "\n");
  }
  void text(const std::string& file, const std::string& content) const {
    write_atomic((fs::path(dir_) / file).string(), content);
  }

 private:
  std::string dir_;
  bool csv_, json_;
};

struct Context {
  const ExperimentConfig& cfg;
  const Artifacts& out;
  const GridField& u;
  const HessianField& H;
  const SolveReport& solve;
  json& report;
  std::ostream* log;
};

SuiteVerdict convergence_suite(const ExperimentConfig& cfg, const std::vector<GridField>& fields, const Artifacts& out,
                               json& report) {
  std::vector<double> hs, errors;
  for (const auto& u : fields) {
    const Grid& g = *u.grid;
    double err = 0.0;
    for (int node : g.interior_nodes()) err = std::max(err, std::abs(u.values[node] - (*cfg.exact)(g.coords(node))));
    hs.push_back(g.spacing());
    errors.push_back(err);
  }
  std::vector<double> orders;
  for (std::size_t k = 1; k < errors.size(); ++k)
    orders.push_back(errors[k] > 0.0 && errors[k - 1] > 0.0 ? std::log(errors[k - 1] / errors[k]) / std::log(hs[k - 1] / hs[k])
                                                            : std::numeric_limits<double>::quiet_NaN());
  std::ostringstream csv;
  csv << "# N,h,sup_error,order\n";
  for (std::size_t k = 0; k < errors.size(); ++k)
    csv << cfg.grid[k] << ',' << format_number(hs[k]) << ',' << format_number(errors[k]) << ','
        << format_number(k ? orders[k - 1] : std::numeric_limits<double>::quiet_NaN()) << '\n';
  out.csv("convergence.csv", csv.str());

  const auto& b = cfg.bands;
  const bool exact = std::all_of(errors.begin(), errors.end(), [&](double e) { return e <= b.error_floor; });
  bool ordered = errors.size() >= 2;
  double min_order = std::numeric_limits<double>::infinity();
  for (double p : orders) {
    ordered = ordered && std::isfinite(p) && p >= b.convergence_order_min;
    if (std::isfinite(p)) min_order = std::min(min_order, p);
  }
  json j{{"N", cfg.grid}, {"h", hs}, {"sup_error", errors}, {"order", json::array()},
         {"order_min", b.convergence_order_min}, {"error_floor", b.error_floor}, {"at_floor", exact}};
  for (double p : orders) j["order"].push_back(std::isfinite(p) ? json(p) : json(nullptr));
  report["convergence"] = j;

  SuiteVerdict v{"convergence", Status::fail, ""};
  std::ostringstream d;
  d << "errors";
  for (double e : errors) d << ' ' << fmt(e, 3);
  if (exact) {
    v.status = Status::pass;
    d << " all <= floor " << fmt(b.error_floor);
  } else if (errors.size() < 2) {
    v.status = Status::inconclusive;
    d << "; one grid gives no order";
  } else {
    v.status = ordered ? Status::pass : Status::fail;
    d << "; min order " << fmt(min_order, 3) << " vs >= " << fmt(b.convergence_order_min);
  }
  v.detail = d.str();
  return v;
}

SuiteVerdict growth(const Context& c, GrowthReport& kept) {
  kept = growth_suite(c.u, c.H, c.cfg.bands.growth);
  c.report["growth"] = to_json(kept);
  c.out.csv("growth_bands.csv", band_table_csv(kept.bands));
  if (kept.flat) c.out.csv("growth_flat.csv", band_table_csv(*kept.flat));
  c.out.csv("growth_fits.csv", growth_fits_csv(kept.checks));
  std::string d;
  for (const auto& ch : kept.checks)
    if (ch.band) d += fit_text(ch) + (ch.pass ? "" : " [out]") + "; ";
  if (d.empty())
    for (const auto& ch : kept.checks) d += fit_text(ch) + "; ";
  d += "sandwich violations " + std::to_string(kept.lower_sandwich_violations);
  return {"growth", kept.pass ? Status::pass : Status::fail, d};
}

SuiteVerdict pogorelov(const Context& c) {
  const auto& b = c.cfg.bands;
  const auto r = pogorelov_suite(c.u, c.H, dyadic_levels(c.u.sup_abs(), b.pogorelov_levels), b.pogorelov_spread);
  c.report["pogorelov"] = to_json(r);
  c.out.csv("pogorelov.csv", pogorelov_csv(r));
  const bool inclusion = std::all_of(r.levels.begin(), r.levels.end(), [](const auto& L) { return L.inclusion; });
  std::string d = "ratio spread " + fmt(r.ratio_spread) + " vs <= " + fmt(r.spread_limit) + ", inclusion " +
                  (inclusion ? "all levels" : "violated") + ", nested " + (r.nested ? "yes" : "no");
  return {"pogorelov", r.pass ? Status::pass : Status::fail, d};
}

SuiteVerdict integrability(const Context& c) {
  const auto& p = c.cfg.problem;
  const auto& b = c.cfg.bands;
  const auto r = integrability_sweep(c.H, p.delta_list, p.h_list);
  c.report["integrability"] = to_json(r);
  c.out.csv("integrability.csv", integrability_csv(r));
  c.out.csv("integrability_beta.csv", integrability_beta_csv(r));

  bool pass = true;
  std::string d = "delta* " + fmt(r.delta_star) + " (" + r.delta_star_status + ")";
  if (b.delta_star) {
    const bool ok = r.delta_star_status == "crossing" && b.delta_star->contains(r.delta_star);
    pass = pass && ok;
    d += " vs (" + fmt(b.delta_star->lo) + "," + fmt(b.delta_star->hi) + ")";
  }
  auto classify = [&](const std::optional<double>& delta, Integrability want) {
    if (!delta) return;
    const int i = index_of(r.delta, *delta);
    const bool ok = i >= 0 && r.classification[i] == want;
    pass = pass && ok;
    d += "; beta(" + fmt(*delta) + ") " + (i >= 0 ? fmt(r.beta[i], 3) : std::string("n/a")) + " " +
         (i >= 0 ? to_string(r.classification[i]) : "missing") + " (want " + to_string(want) + ")";
  };
  classify(b.convergent_delta, Integrability::convergent);
  classify(b.divergent_delta, Integrability::divergent);
  return {"integrability", pass ? Status::pass : Status::fail, d};
}

SuiteVerdict slicing(const Context& c, SlicingSuite& kept) {
  kept = slicing_suite(c.u, c.H, c.cfg.problem.lambda, c.cfg.problem.xn_list);
  c.report["slicing"] = to_json(kept);
  c.out.csv("slicing.csv", slicing_csv(kept));
  const double need = c.cfg.bands.slicing_fraction;
  bool pass = true;
  std::string d;
  for (const auto& s : kept.slices) {
    const bool ok = s.fraction >= need && std::isfinite(s.min_dnn) && s.min_dnn >= s.bound;
    pass = pass && ok;
    d += "x=" + fmt(s.xn) + " fraction " + fmt(s.fraction, 3) + " min D_nn " + fmt(s.min_dnn) + " >= " +
         fmt(s.bound) + (ok ? "" : " [fail]") + "; ";
  }
  d += "fraction needed " + fmt(need);
  return {"slicing", pass ? Status::pass : Status::fail, d};
}

SuiteVerdict hadamard(const Context& c) {
  const auto& p = c.cfg.problem;
  const Grid& g = *c.u.grid;
  const double eps = effective_eps_floor(p, c.cfg.solver);
  std::vector<double> f(g.node_count(), 0.0);
  for (int node = 0; node < g.node_count(); ++node) {
    if (g.kind(node) == NodeKind::exterior) continue;
    f[node] = p.f(g.coords(node)) * (p.s == 0.0 ? 1.0 : std::pow(std::max(std::abs(c.u.values[node]), eps), p.s));
  }
  const auto r = hadamard_report(c.H, f, 4.0 * g.spacing());
  const double limit = c.cfg.bands.hadamard_residual >= 0.0 ? c.cfg.bands.hadamard_residual
                                                            : 10.0 * c.cfg.solver.newton_tolerance / p.lambda;
  json j = to_json(r, g);
  j["residual_limit"] = limit;
  c.report["hadamard"] = j;

  std::string d = "inequality " + std::to_string(r.checked - r.violations) + "/" + std::to_string(r.checked) +
                  " nodes (tol " + fmt(r.tolerance, 3) + "); |det-f|/f far from boundary " +
                  fmt(r.max_relative_residual_far, 3) + " (median " +
                  fmt(r.median_relative_residual_far, 3) + ") vs <= " + fmt(limit, 3) + " over " +
                  std::to_string(r.far_nodes) + " nodes";
  if (r.far_nodes == 0) return {"hadamard", r.pass ? Status::inconclusive : Status::fail, d};
  return {"hadamard", r.pass && r.max_relative_residual_far <= limit ? Status::pass : Status::fail, d};
}

SuiteVerdict degenerate(const Context& c) {
  const auto& p = c.cfg.problem;
  const auto r = degenerate_exponent_suite(c.u, c.H, p.s, p.mu1, p.mu2, c.cfg.bands.degenerate);
  c.report["degenerate"] = to_json(r);
  c.out.csv("degenerate_flat.csv", band_table_csv(r.flat));
  c.out.csv("degenerate_fits.csv", growth_fits_csv({r.u_fit, r.dnn_fit}));
  const int limit = c.cfg.bands.max_outer_iters;
  const bool outer_ok = c.solve.outer_iterations <= limit;
  std::string d = fit_text(r.u_fit) + "; " + fit_text(r.dnn_fit) + "; outer iterations " +
                  std::to_string(c.solve.outer_iterations) + " vs <= " + std::to_string(limit);
  return {"degenerate", r.pass && outer_ok ? Status::pass : Status::fail, d};
}

SuiteVerdict oracle_crosscheck(const Context& c) {
  const Grid& g = *c.u.grid;
  std::vector<Point> nodes;
  for (int node : g.interior_nodes()) nodes.push_back(g.coords(node));
  const auto r = oliker_prussner_oracle(g.domain(), c.cfg.problem.f, nodes);
  double scale = 0.0, diff = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    scale = std::max(scale, std::abs(r.values[k]));
    diff = std::max(diff, std::abs(r.values[k] - c.u.values[g.interior_nodes()[k]]));
  }
  const double rel = scale > 0.0 ? diff / scale : std::numeric_limits<double>::infinity();
  const double limit = c.cfg.bands.oracle_relative;
  std::ostringstream csv;
  csv << "# x1,x2,u_scheme,u_oracle\n";
  for (std::size_t k = 0; k < nodes.size(); ++k)
    csv << format_number(nodes[k][0]) << ',' << format_number(nodes[k][1]) << ','
        << format_number(c.u.values[g.interior_nodes()[k]]) << ',' << format_number(r.values[k]) << '\n';
  c.out.csv("oracle.csv", csv.str());
  c.report["oracle_crosscheck"] = {{"nodes", nodes.size()},       {"lifts", r.lifts},
                                   {"sweeps", r.sweeps},          {"max_defect", r.max_defect},
                                   {"sup_oracle", scale},         {"max_difference", diff},
                                   {"relative_difference", rel},  {"limit", limit}};
  std::string d = "max |u_scheme - u_oracle| / sup|u_oracle| = " + fmt(rel, 3) + " vs <= " + fmt(limit) + " over " +
                  std::to_string(nodes.size()) + " nodes";
  return {"oracle_crosscheck", rel <= limit ? Status::pass : Status::fail, d};
}

Constants measured_constants(const ExperimentConfig& cfg, const GridField& u, const GrowthReport* g,
                             const SlicingSuite* s) {
  const int n = cfg.problem.dim();
  Constants k;
  k.M1 = u.sup_abs();
  k.M2 = cfg.problem.domain.volume();
  k.volume_ratio = k.M2 / std::pow(k.M1, 0.5 * n);
  k.a = slicing_exponent_a(n);
  k.gamma = cfg.problem.gamma;
  k.alpha = n == 2 ? 2.0 / (1.0 + cfg.problem.gamma) : 2.0 / n;
  if (g) k.alpha = g->alpha;
  if (s) {
    k.C0 = s->C0;
    k.C1 = s->C1;
  }
  return k;
}

json config_echo(const ExperimentConfig& cfg) {
  return {{"dim", cfg.problem.dim()},
          {"grid", cfg.grid},
          {"suites", cfg.suites},
          {"s", cfg.problem.s},
          {"lambda", cfg.problem.lambda},
          {"Lambda", cfg.problem.Lambda},
          {"f", cfg.problem.f.text()},
          {"warm_start", cfg.warm_start},
          {"stencil_width", cfg.solver.stencil_width},
          {"newton_tolerance", cfg.solver.newton_tolerance}};
}

}  // namespace

RunVerdict run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  RunVerdict verdict;
  verdict.name = cfg.name;
  verdict.claim = cfg.claim;
  verdict.output_dir = resolve_output_dir(cfg, options.out_dir);
  std::ostream* log = options.log;
  json& report = verdict.report;
  report = {{"name", cfg.name}, {"claim", cfg.claim}, {"config", config_echo(cfg)}, {"solves", json::array()}};

  std::unique_ptr<Artifacts> out;
  try {
    out = std::make_unique<Artifacts>(verdict.output_dir, cfg.formats);
  } catch (const std::exception& e) {
    verdict.exit_code = exit_config_error;
    verdict.message = std::string("cannot create output directory: ") + e.what();
    return verdict;
  }
  auto finish = [&](int code) {
    verdict.exit_code = code;
    report["verdicts"] = json::array();
    for (const auto& v : verdict.suites)
      report["verdicts"].push_back({{"suite", v.suite}, {"status", to_string(v.status)}, {"detail", v.detail}});
    report["converged"] = verdict.converged;
    report["exit_code"] = code;
    if (!verdict.message.empty()) report["message"] = verdict.message;
    try {
      out->json_file("report.json", report);
      out->text("verdict.txt", verdict.summary());
    } catch (const std::exception& e) {
      verdict.message += std::string(verdict.message.empty() ? "" : "; ") + "artifact write failed: " + e.what();
    }
    return verdict;
  };

  // Solves, coarse to fine.
  std::vector<GridField> fields;
  SolveReport last;
  try {
    for (int N : cfg.grid) {
      auto grid = std::make_shared<const Grid>(build_grid(cfg.problem.domain, N));
      GridField start;
      const GridField* init = nullptr;
      if (cfg.warm_start && !fields.empty()) {
        start = prolong(fields.back(), grid);
        init = &start;
      }
      auto solve = [&](const GridField* start_from) {
        return cfg.problem.s == 0.0 ? solve_dirichlet(cfg.problem, grid, cfg.solver, start_from)
                                    : solve_degenerate(cfg.problem, grid, cfg.solver, start_from);
      };
      // A prolonged field can be far from convex near curved boundaries;
      // when Newton stalls from it, start over from the default guess.
      bool fallback = false;
      std::pair<GridField, SolveReport> result;
      if (init) {
        try {
          result = solve(init);
          fallback = !result.second.converged;
        } catch (const ConvergenceError&) {
          fallback = true;
        }
      }
      if (!init || fallback) result = solve(nullptr);
      auto& [u, rep] = result;
      json j = to_json(rep);
      j["warm_start_fallback"] = fallback;
      j["N"] = N;
      j["h"] = grid->spacing();
      j["unknowns"] = grid->unknown_count();
      report["solves"].push_back(j);
      if (log)
        *log << "[" << cfg.name << "] N=" << N << " newton=" << rep.newton_iterations
             << " outer=" << rep.outer_iterations << " residual=" << rep.residual
             << (rep.converged ? "" : " NOT CONVERGED") << std::endl;
      fields.push_back(std::move(u));
      last = rep;
      if (!rep.converged) {
        out->csv("solution.csv", solution_csv(fields.back()));
        verdict.message = "solver did not converge on N=" + std::to_string(N) + " (residual " +
                          format_number(rep.residual) + ")";
        return finish(exit_not_converged);
      }
    }
  } catch (const ConvergenceError& e) {
    if (!fields.empty()) out->csv("solution.csv", solution_csv(fields.back()));
    verdict.message = e.what();
    return finish(exit_not_converged);
  } catch (const Error& e) {
    verdict.message = e.what();
    return finish(exit_config_error);
  }
  verdict.converged = true;
  const GridField& u = fields.back();
  out->csv("solution.csv", solution_csv(u));
  if (options.solve_only) return finish(exit_success);

  HessianField H;
  try {
    H = hessian_field(u);
    out->csv("hessian.csv", hessian_csv(H));
  } catch (const ResolutionError& e) {
    for (const auto& s : cfg.suites) verdict.suites.push_back({s, Status::inconclusive, e.what()});
    verdict.message = e.what();
    return finish(exit_suite_failure);
  }

  json suites = json::object();
  const Context ctx{cfg, *out, u, H, last, suites, log};
  GrowthReport growth_kept;
  SlicingSuite slicing_kept;
  bool have_growth = false, have_slicing = false;
  for (const auto& name : cfg.suites) {
    if (log) *log << "[" << cfg.name << "] suite " << name << std::endl;
    SuiteVerdict v{name, Status::inconclusive, ""};
    try {
      if (name == "convergence") v = convergence_suite(cfg, fields, *out, suites);
      else if (name == "growth") v = growth(ctx, growth_kept), have_growth = true;
      else if (name == "pogorelov") v = pogorelov(ctx);
      else if (name == "integrability") v = integrability(ctx);
      else if (name == "slicing") v = slicing(ctx, slicing_kept), have_slicing = true;
      else if (name == "hadamard") v = hadamard(ctx);
      else if (name == "degenerate") v = degenerate(ctx);
      else if (name == "oracle_crosscheck") v = oracle_crosscheck(ctx);
    } catch (const Error& e) {
      v = {name, Status::inconclusive, e.what()};
    }
    verdict.suites.push_back(v);
  }
  report["suites"] = suites;
  report["constants"] =
      to_json(measured_constants(cfg, u, have_growth ? &growth_kept : nullptr, have_slicing ? &slicing_kept : nullptr));
  const bool all_pass =
      std::all_of(verdict.suites.begin(), verdict.suites.end(), [](const auto& v) { return v.status == Status::pass; });
  return finish(all_pass ? exit_success : exit_suite_failure);
}

RunVerdict run_config_file(const std::string& path, const RunOptions& options) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(path);
  } catch (const Error& e) {
    RunVerdict v;
    v.name = path;
    v.exit_code = exit_config_error;
    v.message = e.what();
    return v;
  }
  return run_experiment(cfg, options);
}

std::vector<PresetInfo> list_presets(const std::string& dir) {
  std::vector<PresetInfo> out;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return out;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir, ec))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    PresetInfo info{f.stem().string(), "", f.string()};
    try {
      const auto cfg = load_config(f.string());
      info.name = cfg.name;
      info.claim = cfg.claim;
    } catch (const Error& e) {
      info.claim = std::string("(invalid: ") + e.what() + ")";
    }
    out.push_back(info);
  }
  return out;
}

}  // namespace masharp
