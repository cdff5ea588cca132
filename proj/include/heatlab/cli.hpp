#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace heatlab {

enum class Subcommand { osgood, schedule, evolve, estimate, example, report };

std::string to_string(Subcommand s);
/// Throws std::invalid_argument for an unknown name.
Subcommand parse_subcommand(const std::string& name);

struct RunConfig {
  Subcommand subcommand = Subcommand::report;
  std::filesystem::path config_path;
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 1;
  /// Relative tolerance for the estimator quadratures.
  double tol = 1e-6;
  int threads = 1;
};

enum ExitStatus : int { exit_ok = 0, exit_verdict = 1, exit_usage = 2 };

struct RunOutcome {
  int status = exit_ok;
  /// Empty on success; the reason otherwise.
  std::string diagnostic;
};

/// Runs the subcommand and writes results.json, its CSV tables and plot.gp
/// into out_dir. Exit 1 on a failed assertion or a numerical failure, 2 on
/// an unreadable or invalid config.
RunOutcome run(const RunConfig& config);

}  // namespace heatlab
