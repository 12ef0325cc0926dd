#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "vwapexec/errors.hpp"
#include "vwapexec_cli/commands.hpp"

namespace cli = vwapexec::cli;

namespace {

struct Options {
  std::string config;
  std::string preset;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> grid_n;
};

void add_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "JSON run configuration");
  cmd->add_option("--preset", o.preset, "built-in parameter set")->check(CLI::IsMember(cli::preset_names()));
  cmd->add_option("--out", o.out, "output directory (overrides the config)");
  cmd->add_option("--seed", o.seed, "Monte Carlo seed (overrides the config)");
  cmd->add_option("--grid-n", o.grid_n, "number of grid steps (overrides the config)");
}

cli::RunConfig resolve(const Options& o) {
  if (o.config.empty() == o.preset.empty()) throw cli::ConfigError("give exactly one of --config or --preset");
  cli::RunConfig cfg = o.config.empty() ? cli::preset(o.preset) : cli::load_config(o.config);
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.seed) cfg.monte_carlo.seed = *o.seed;
  if (o.grid_n) cfg.grid_n = *o.grid_n;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Volume-aware optimal execution: solve, validate, expand, simulate"};
  app.require_subcommand(1);
  Options opts;
  using Command = cli::CommandResult (*)(const cli::RunConfig&, const std::filesystem::path&);
  Command selected = nullptr;
  const std::pair<const char*, Command> commands[] = {
      {"solve", cli::cmd_solve}, {"validate", cli::cmd_validate}, {"expand", cli::cmd_expand}, {"simulate", cli::cmd_simulate}};
  const char* help[] = {"optimal strategies for every lambda (and rho)", "analytic vs simulation cross-checks",
                        "asymptotic expansion against the exact optimum", "cost moments by simulation"};
  for (std::size_t i = 0; i < 4; ++i) {
    auto* sub = app.add_subcommand(commands[i].first, help[i]);
    add_options(sub, opts);
    sub->callback([&, i] { selected = commands[i].second; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kConfigError;
  }

  try {
    const cli::RunConfig cfg = resolve(opts);
    const auto result = selected(cfg, cfg.output_dir);
    std::cout << result.summary.dump() << '\n';
    return result.exit_code;
  } catch (const cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return cli::kConfigError;
  } catch (const vwapexec::Error& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return cli::kSolverFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kInternalError;
  }
}
