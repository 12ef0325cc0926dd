#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "vwapexec_cli/config.hpp"

namespace vwapexec::cli {

enum ExitCode : int { kOk = 0, kChecksFailed = 1, kConfigError = 2, kSolverFailure = 3, kInternalError = 4 };

struct CommandResult {
  int exit_code = kOk;
  nlohmann::json summary;  // printed on stdout by the executable
};

/// Optimal strategy for every (lambda, rho); writes strategy_<label>.csv and report.json.
CommandResult cmd_solve(const RunConfig& cfg, const std::filesystem::path& out_dir);

/// Analytic-vs-simulation and solver-vs-solver checks; writes validate.json.
CommandResult cmd_validate(const RunConfig& cfg, const std::filesystem::path& out_dir);

/// Zeroth/first-order expansion curves against the exact optimum; deterministic volume only.
CommandResult cmd_expand(const RunConfig& cfg, const std::filesystem::path& out_dir);

/// Cost moments by simulation for the benchmark and optimal strategies; writes simulate.json.
CommandResult cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out_dir);

/// "lambda0.5" or "lambda10_rho-0.9".
std::string run_label(double lambda, const double* rho = nullptr);

}  // namespace vwapexec::cli
