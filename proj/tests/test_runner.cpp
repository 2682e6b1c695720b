#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "sheetgame/runner.hpp"

using namespace sheetgame;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("sheetgame_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

json example1_config() {
  return json::parse(R"({
    "grid": {"T": 1.0, "X": 1.0, "nt": 4, "nx": 4},
    "seed": 1, "n_paths": 1,
    "params": {"a1": 1.0, "a2": 1.0, "c1": 1.0, "c2": 1.0, "sigma": 0.0, "y": 1.0},
    "nash_check": false
  })");
}

}  // namespace

TEST_CASE("successful run writes outputs and manifest") {
  RunOverrides o;
  o.out_dir = scratch("ok");
  const RunResult r = run("solve-example1", example1_config(), o);
  CHECK(r.status == kPass);
  CHECK(std::filesystem::exists(*o.out_dir / "solution.csv"));
  CHECK(std::filesystem::exists(*o.out_dir / "diagnostics.csv"));
  std::ifstream in(r.manifest);
  const json m = json::parse(in);
  CHECK(m["pass"] == true);
  CHECK(m["version"] == kVersion);
  CHECK(m["seed"] == 1);
  CHECK(m["config"]["grid"]["nt"] == 4);
}

TEST_CASE("config errors map to status 2 and name the key") {
  RunOverrides o;
  o.out_dir = scratch("bad");
  json c = example1_config();
  c["grid"].erase("nt");
  RunResult r = run("solve-example1", c, o);
  CHECK(r.status == kConfigInvalid);
  CHECK(r.message.find("grid.nt") != std::string::npos);
  c = example1_config();
  c["params"]["extra"] = 1;
  r = run("solve-example1", c, o);
  CHECK(r.status == kConfigInvalid);
  CHECK(r.message.find("params.extra") != std::string::npos);
  c = example1_config();
  c["grid"]["nt"] = 0;
  CHECK(run("solve-example1", c, o).status == kConfigInvalid);
  CHECK(run("no-such-thing", example1_config(), o).status == kConfigInvalid);
  c = example1_config();
  c["subcommand"] = "verify-ito";
  CHECK(run("solve-example1", c, o).status == kConfigInvalid);
  CHECK(run_file("solve-example1", *o.out_dir / "missing.json", o).status == kConfigInvalid);
}

TEST_CASE("numerical failures map to status 3") {
  RunOverrides o;
  o.out_dir = scratch("num");
  json c = example1_config();
  c["picard"] = {{"max_iter", 2}};
  const RunResult r = run("solve-example1", c, o);
  CHECK(r.status == kNumericalFailure);
  CHECK(r.message.find("residual") != std::string::npos);
}

TEST_CASE("failed checks map to status 1") {
  RunOverrides o;
  o.out_dir = scratch("fail");
  json c = example1_config();
  c["nash_check"] = true;
  const RunResult r = run("solve-example1", c, o);
  CHECK(r.status == kCheckFailed);
  CHECK(std::filesystem::exists(*o.out_dir / "nash.csv"));
}

TEST_CASE("outputs do not depend on the worker count") {
  const json c = json::parse(R"({
    "grid": {"T": 1.0, "X": 1.0, "nt": 4, "nx": 4},
    "seed": 3, "n_paths": 64,
    "params": {"alpha1": 1.0, "alpha2": 1.0, "beta1": 2.0, "beta2": 2.0, "sigma": 0.5, "source": 1.0, "y": 0.0}
  })");
  RunOverrides a, b;
  a.out_dir = scratch("w1");
  a.workers = 1;
  b.out_dir = scratch("w4");
  b.workers = 4;
  run("symmetric-report", c, a);
  run("symmetric-report", c, b);
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  CHECK(slurp(*a.out_dir / "symmetric.csv") == slurp(*b.out_dir / "symmetric.csv"));
  CHECK(!slurp(*a.out_dir / "symmetric.csv").empty());
}

TEST_CASE("number formatting round-trips") {
  CHECK(std::stod(format_number(0.1)) == 0.1);
  CHECK(format_number(2.0) == "2");
}
