#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "actflow/cli.hpp"
#include "actflow/config.hpp"

using namespace actflow;

namespace fs = std::filesystem;

namespace {

const char* kSmall = R"({
  "name": "cli_small",
  "seed": 5,
  "grid": {"Lx": 1.0, "Ly": 1.0, "nx": 8, "ny": 8, "x_boundary": "periodic", "y_boundary": "wall"},
  "coefficients": {
    "preset": "bingham_const",
    "nu": {"breakpoints": [0.0], "values": [0.02]},
    "tau2": {"breakpoints": [0.0], "values": [0.05]},
    "c1": 0.02
  },
  "solver": {"dt": 0.01, "t_final": 0.04, "k": 8, "picard_tol": 1e-12, "picard_max": 500},
  "initial": {"velocity": "vortex", "amplitude": 0.5, "e0": 0.8},
  "output": {"snapshot_every": 2}
})";

fs::path scratch(const char* name) {
  const fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "actflow");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("syntax errors carry line and column") {
  try {
    parse_config("{\n  \"name\": \"x\",\n  oops\n}");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("line 3") != std::string::npos);
    CHECK(what.find("column") != std::string::npos);
  }
}

TEST_CASE("unknown keys and wrong types are rejected") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"grid": {"nx": 8, "nz": 3}})"), doctest::Contains("unknown key 'nz'"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"solver": {"dt": "fast"}})"), doctest::Contains("dt"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed": -3})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"coefficients": {"preset": "honey"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"solver": {"body_force": [1.0]}})"), ConfigError);
}

TEST_CASE("semantic validation names the violated hypothesis") {
  SimConfig cfg = parse_config(kSmall);
  CHECK_NOTHROW(validate_config(cfg));
  cfg.initial.e0 = 0.05;
  CHECK_THROWS_WITH_AS(validate_config(cfg), doctest::Contains("e0 >= c3"), ConfigError);
  cfg = parse_config(kSmall);
  cfg.solver.dt = 0.0;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  cfg = parse_config(kSmall);
  cfg.grid.x_boundary = Boundary::kWall;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/actflow.json"), ConfigError);
}

TEST_CASE("dump and parse round trip") {
  const SimConfig cfg = parse_config(kSmall);
  CHECK(cfg.name == "cli_small");
  CHECK(cfg.seed == 5);
  CHECK(cfg.coefficients.c1 == 0.02);
  const SimConfig back = parse_config(dump_config(cfg));
  CHECK(back == cfg);
  CHECK(dump_config(back) == dump_config(cfg));
  CHECK(parse_config(R"({"coefficients": {"preset": "paper_example"}})").coefficients == make_preset("activated"));
}

TEST_CASE("simulate is deterministic and its output audits clean") {
  const fs::path dir = scratch("actflow_test_cli_sim");
  std::ofstream(dir / "cfg.json") << kSmall;
  const std::string cfg = (dir / "cfg.json").string();

  const Run a = cli({"simulate", "--config", cfg, "--out", (dir / "a").string()});
  REQUIRE(a.code == kExitOk);
  const Run b = cli({"simulate", "--config", cfg, "--out", (dir / "b").string()});
  REQUIRE(b.code == kExitOk);
  CHECK(slurp(dir / "a" / "budgets.csv") == slurp(dir / "b" / "budgets.csv"));
  CHECK_FALSE(slurp(dir / "a" / "budgets.csv").empty());

  const Run audit = cli({"audit", (dir / "a").string()});
  CHECK(audit.code == kExitOk);
  CHECK(audit.out.rfind("audit: PASS", 0) == 0);
  CHECK(fs::exists(dir / "a" / "audit.csv"));

  CHECK(cli({"audit", "--out", (dir / "missing").string()}).code == kExitUsage);
  CHECK(cli({"simulate", "--config", (dir / "nope.json").string()}).code == kExitUsage);
  CHECK(cli({"simulate"}).code == kExitUsage);

  std::ofstream(dir / "cold.json") << R"({"initial": {"e0": 0.01}})";
  const Run cold = cli({"simulate", "--config", (dir / "cold.json").string(), "--out", (dir / "c").string()});
  CHECK(cold.code == kExitUsage);
  CHECK(cold.err.find("e0 >= c3") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("verify-graphs passes on the presets and reports a broken set") {
  const Run ok = cli({"verify-graphs", "--samples", "2000", "--k", "1,8"});
  CHECK(ok.code == kExitOk);
  CHECK(ok.out.find("all properties hold") != std::string::npos);

  const Run newt = cli({"verify-graphs", "--preset", "newtonian", "--samples", "500", "--k", "4"});
  CHECK(newt.code == kExitOk);
  CHECK(newt.out.find("4,0,") != std::string::npos);  // zero displacement

  CoefficientSet bad = make_preset("activated");
  bad.nu = PiecewiseLinear::constant(-1.0);
  CliOptions opt;
  opt.samples = 500;
  opt.k_list = {8};
  std::ostringstream out, err;
  CHECK(cmd_verify_graphs(opt, out, err, &bad) == kExitCheckFailed);
  CHECK(err.str().find("counterexample") != std::string::npos);
  CHECK(out.str().find("FAIL") != std::string::npos);
}

TEST_CASE("bench and argument errors") {
  CHECK(cli({"bench", "no_such_scenario"}).code == kExitUsage);
  CHECK(cli({"bench"}).code == kExitUsage);
  const fs::path dir = scratch("actflow_test_cli_bench");
  const Run h = cli({"bench", "hysteresis_loop", "--out", dir.string()});
  CHECK(h.code == kExitOk);
  CHECK(h.out.find("hysteresis_loop: PASS") != std::string::npos);
  fs::remove_all(dir);

  CHECK(cli({"verify-graphs", "--k", "1,x"}).code == kExitUsage);
  CHECK(cli({"verify-graphs", "--k", "0"}).code == kExitUsage);
  CHECK(cli({"verify-graphs", "--samples", "0"}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({}).code == kExitUsage);
}
