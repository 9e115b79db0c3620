#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "masharp/config.hpp"
#include "masharp/runner.hpp"

using namespace masharp;
namespace fs = std::filesystem;

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "masharp_runner_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

CommandResult cli(const std::string& args, const fs::path& dir, const std::string& env = "") {
  const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = "cd '" + dir.string() + "' && " + env + " '" + MASHARP_CLI + "' " + args + " >'" +
                          out.string() + "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  CommandResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

const std::string kSmallBox = R"({"name": "small", "problem": {"domain": {"kind": "box", "intervals": [[-1, 1], [0, 2]]}},
  "grid": [129], "suites": ["growth", "pogorelov"], "bands": {"pogorelov_levels": 3}})";

}  // namespace

TEST_CASE("a config without a problem block exits with code 2") {
  const auto dir = scratch("malformed");
  write_file(dir / "bad.json", R"({"grid": [17], "suites": ["growth"]})");
  const auto r = cli("run bad.json", dir);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("problem") != std::string::npos);
  CHECK(cli("run does_not_exist.json", dir).exit_code == 2);
  CHECK(cli("frobnicate", dir).exit_code == 2);
}

TEST_CASE("preset listing is stable and complete") {
  const auto dir = scratch("presets");
  const auto a = cli("presets", dir), b = cli("presets", dir);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  for (const char* name : {"ball2d_convergence", "box2d_sharp", "box3d_flat", "degenerate_s_neg1", "oracle_square"})
    CHECK(a.out.find(name) != std::string::npos);
  CHECK(a.out.find("ball2d_convergence") < a.out.find("box2d_sharp"));
  const auto listed = list_presets(MASHARP_PRESET_DIR);
  REQUIRE(listed.size() == 5);
  for (const auto& p : listed) CHECK_FALSE(p.claim.empty());
}

TEST_CASE("running a preset by name writes its artifacts") {
  const auto dir = scratch("oracle");
  const auto r = cli("run oracle_square --out res", dir);
  // The cross-check passes; the determinant residual on this coarse grid
  // does not, so the run as a whole exits with code 1.
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("oracle_crosscheck: PASS") != std::string::npos);
  CHECK(r.out.find("hadamard: FAIL") != std::string::npos);
  for (const char* f : {"solution.csv", "hessian.csv", "oracle.csv", "report.json", "verdict.txt"})
    CHECK(fs::exists(dir / "res" / f));
  CHECK(slurp(dir / "res" / "verdict.txt") == r.out.substr(0, r.out.find("artifacts:")));
}

TEST_CASE("hitting the Newton cap exits with code 3 and keeps the partial field") {
  const auto dir = scratch("capped");
  write_file(dir / "capped.json", R"({"name": "capped", "problem": {"domain": {"kind": "box", "intervals": [[-1, 1], [0, 2]]}},
    "grid": [33], "solver": {"max_newton_iters": 1}, "suites": ["growth"]})");
  const auto r = cli("run capped.json --out res", dir);
  CHECK(r.exit_code == 3);
  CHECK(fs::exists(dir / "res" / "solution.csv"));
  CHECK_FALSE(fs::exists(dir / "res" / "growth_bands.csv"));
}

TEST_CASE("solve subcommand skips the suites") {
  const auto dir = scratch("solve");
  write_file(dir / "small.json", kSmallBox);
  const auto r = cli("solve small.json --out res", dir);
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir / "res" / "solution.csv"));
  CHECK_FALSE(fs::exists(dir / "res" / "pogorelov.csv"));
}

TEST_CASE("output directory precedence") {
  auto cfg = parse_config(kSmallBox);
  CHECK(resolve_output_dir(cfg, "cli") == "cli");
  cfg.output_dir = "from_config";
  CHECK(resolve_output_dir(cfg, "") == "from_config");
  CHECK(resolve_output_dir(cfg, "cli") == "cli");

  const auto dir = scratch("precedence");
  write_file(dir / "small.json", kSmallBox);
  CHECK(cli("run small.json", dir, "MASHARP_OUT=envout").exit_code == 0);
  CHECK(fs::exists(dir / "envout" / "small" / "report.json"));
  CHECK(cli("run small.json", dir, "MASHARP_OUT=").exit_code == 0);
  CHECK(fs::exists(dir / "out" / "small" / "report.json"));
}

TEST_CASE("formats select the artifact kinds") {
  const auto dir = scratch("formats");
  auto cfg = parse_config(R"({"name": "fmt", "problem": {"domain": {"kind": "box", "intervals": [[-1, 1], [0, 2]]}},
    "grid": [129], "suites": ["growth"], "output": {"formats": ["json"]}})");
  RunOptions opt;
  opt.out_dir = (dir / "res").string();
  const auto v = run_experiment(cfg, opt);
  CHECK(v.exit_code == 0);
  CHECK(fs::exists(dir / "res" / "report.json"));
  CHECK(fs::exists(dir / "res" / "verdict.txt"));
  CHECK_FALSE(fs::exists(dir / "res" / "solution.csv"));
  CHECK(v.report["converged"] == true);
}

TEST_CASE("atomic writes replace files whole") {
  const auto dir = scratch("atomic");
  const auto p = (dir / "x.txt").string();
  write_atomic(p, "first");
  write_atomic(p, "second");
  CHECK(slurp(p) == "second");
  CHECK_FALSE(fs::exists(p + ".tmp"));
}
