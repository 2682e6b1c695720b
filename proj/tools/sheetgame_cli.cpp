#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "sheetgame/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Brownian-sheet stochastic calculus checks and SPDE game solvers"};
  app.set_version_flag("--version", std::string(sheetgame::kVersion));
  app.require_subcommand(1);

  std::string config;
  sheetgame::RunOverrides overrides;
  std::uint64_t seed = 0;
  std::size_t paths = 0;
  int workers = 0;
  std::string out;

  for (const auto& name : sheetgame::subcommands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("-c,--config", config, "JSON config file")->required();
    sub->add_option("-o,--out", out, "output directory");
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--paths", paths, "override the number of Monte Carlo paths")->check(CLI::PositiveNumber);
    sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sheetgame::kConfigInvalid;
  }

  const CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--seed")) overrides.seed = seed;
  if (sub->count("--paths")) overrides.paths = paths;
  if (sub->count("--workers")) overrides.workers = workers;
  if (sub->count("--out")) overrides.out_dir = out;

  const sheetgame::RunResult r = sheetgame::run_file(sub->get_name(), config, overrides);
  for (const auto& c : r.checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  }
  (r.status == sheetgame::kPass ? std::cout : std::cerr) << r.message << '\n';
  return r.status;
}
