#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace sheetgame {

inline constexpr const char* kVersion = "0.1.0";

/// Exit statuses of the command-line runner.
enum ExitStatus : int { kPass = 0, kCheckFailed = 1, kConfigInvalid = 2, kNumericalFailure = 3 };

/// Subcommand names accepted by run().
const std::vector<std::string>& subcommands();

/// Command-line values that take precedence over the config file.
struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<int> workers;
  std::optional<std::filesystem::path> out_dir;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunResult {
  int status = kPass;
  std::string message;
  std::vector<CheckResult> checks;
  std::vector<std::filesystem::path> outputs;  // CSV files written
  std::filesystem::path manifest;
};

/// Runs one subcommand on a parsed config. Writes CSV outputs and
/// manifest.json into the output directory (override, then config key
/// "output_dir", then "out"). Never throws: errors map to exit statuses.
RunResult run(const std::string& subcommand, const nlohmann::json& config, const RunOverrides& overrides);

/// Reads and parses a JSON config file, then runs it.
RunResult run_file(const std::string& subcommand, const std::filesystem::path& config_path,
                   const RunOverrides& overrides);

/// Formats a value with 17 significant digits.
std::string format_number(double v);

}  // namespace sheetgame
