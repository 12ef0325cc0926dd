#include "vwapexec_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "vwapexec/bvp.hpp"
#include "vwapexec/errors.hpp"
#include "vwapexec/io.hpp"
#include "vwapexec/montecarlo.hpp"
#include "vwapexec/optimizer.hpp"

namespace vwapexec::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json config_record(const RunConfig& cfg) {
  json j = config_to_json(cfg);
  // Reports must not depend on where they are written or how many threads ran.
  j.erase("output_dir");
  j["monte_carlo"].erase("threads");
  return j;
}

double relative_sup(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return diff / scale;
}

double sup_gap(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
  return diff;
}

std::vector<double> scaled(std::vector<double> x, double factor) {
  for (double& v : x) v *= factor;
  return x;
}

// Exact interval averages of v Phi / V_T.
std::vector<double> vwap_interval_rates(const VolumeProfile& profile, double Phi) {
  return scaled(profile.cell_averages(), Phi / profile.total());
}

Strategy shaped_strategy(const TimeGrid& grid, double Phi, double slope) {
  std::vector<double> z(grid.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = 1.0 + slope * (grid.node(i) / grid.horizon() - 0.5);
  Strategy s{grid, std::move(z), Phi, std::nullopt};
  const double total = s.executed();
  for (double& v : s.zeta) v *= Phi / total;
  return s;
}

struct CheckList {
  json items = json::array();

  void add(const std::string& name, bool passed, json details) {
    details["name"] = name;
    details["status"] = passed ? "pass" : "fail";
    items.push_back(std::move(details));
  }
  void skip(const std::string& name, const std::string& reason) {
    items.push_back({{"name", name}, {"status", "skipped"}, {"reason", reason}});
  }
  std::size_t count(const char* status) const {
    return static_cast<std::size_t>(
        std::count_if(items.begin(), items.end(), [&](const json& c) { return c["status"] == status; }));
  }
};

json within_se(double measured, double expected, double se) {
  const double z = se > 0.0 ? (measured - expected) / se : (measured == expected ? 0.0 : INFINITY);
  return {{"measured", measured}, {"expected", expected}, {"std_error", se}, {"z", z}, {"tolerance_se", 3.0}};
}

bool z_ok(const json& d) { return std::abs(d["z"].get<double>()) <= 3.0; }

SimulationConfig simulation_config(const RunConfig& cfg, const TimeGrid& grid, VolumeModel volume, double rho) {
  SimulationConfig sim{grid, cfg.market, std::move(volume), rho, cfg.monte_carlo.n_paths, cfg.monte_carlo.seed,
                       cfg.monte_carlo.antithetic, cfg.monte_carlo.threads};
  sim.validate();
  return sim;
}

void require_converged(const SolveReport& r, const std::string& label) {
  if (r.status != SolveStatus::converged)
    throw SolverFailure(label + ": solver stopped with status " + to_string(r.status));
}

}  // namespace

std::string run_label(double lambda, const double* rho) {
  std::string s = "lambda" + short_number(lambda);
  if (rho) s += "_rho" + short_number(*rho);
  return s;
}

// solve -----------------------------------------------------------------------

CommandResult cmd_solve(const RunConfig& cfg, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  json runs = json::array();
  CommandResult result;
  auto record = [&](const std::string& label, double lambda, const double* rho, const OptimalStrategy& opt) {
    const std::string file = "strategy_" + label + ".csv";
    write_csv(out_dir / file, strategy_table(opt.strategy, opt.inventory));
    json run = {{"label", label}, {"lambda", lambda}, {"file", file}, {"value", opt.value}, {"solver", opt.report}};
    if (rho) run["rho"] = *rho;
    runs.push_back(std::move(run));
    if (opt.report.status != SolveStatus::converged) result.exit_code = kSolverFailure;
  };

  std::string error;
  try {
    if (cfg.problem == ProblemKind::deterministic) {
      const VolumeProfile profile = build_profile(cfg, cfg.grid_n);
      for (double lambda : cfg.lambdas) {
        const auto opt = solve_qp_deterministic(profile, lambda, cfg.market, cfg.Phi, {cfg.nonnegative});
        record(run_label(lambda), lambda, nullptr, opt);
        if (lambda == 0.0)
          runs.back()["vwap_relative_gap"] =
              relative_sup(opt.interval_rates, vwap_interval_rates(profile, cfg.Phi));
      }
    } else {
      const TimeGrid grid = build_grid(cfg.horizon, cfg.grid_n);
      for (double rho : cfg.rhos)
        for (double lambda : cfg.lambdas) {
          const auto opt = solve_sqp_gbm(build_model(cfg, rho), grid, lambda, cfg.market, cfg.Phi);
          record(run_label(lambda, &rho), lambda, &rho, opt);
        }
    }
  } catch (const SolverFailure& e) {
    error = e.what();
    result.exit_code = kSolverFailure;
  }

  json report = {{"schema_version", kSchemaVersion}, {"config", config_record(cfg)}, {"runs", runs}};
  if (!error.empty()) report["error"] = error;
  write_json(out_dir / "report.json", report);
  result.summary = {{"command", "solve"},
                    {"runs", runs.size()},
                    {"all_converged", result.exit_code == kOk},
                    {"report", (out_dir / "report.json").string()}};
  if (!error.empty()) result.summary["error"] = error;
  return result;
}

// validate --------------------------------------------------------------------

namespace {

void validate_deterministic(const RunConfig& cfg, CheckList& checks) {
  const VolumeProfile profile = build_profile(cfg, cfg.grid_n);

  const auto neutral = solve_qp_deterministic(profile, 0.0, cfg.market, cfg.Phi, {cfg.nonnegative});
  const double gap0 = relative_sup(neutral.interval_rates, vwap_interval_rates(profile, cfg.Phi));
  checks.add("risk_neutral_optimum_is_vwap", gap0 <= 1e-8, {{"relative_sup_gap", gap0}, {"tolerance", 1e-8}});

  for (double lambda : cfg.lambdas) {
    if (lambda <= 0.0) continue;
    const auto qp = solve_qp_deterministic(profile, lambda, cfg.market, cfg.Phi, {cfg.nonnegative});
    const auto ode = optimal_inventory_ode(profile, lambda, cfg.market, cfg.Phi);
    const double gap = sup_gap(ode.inventory.phi, qp.inventory.phi);
    checks.add("bvp_matches_qp_" + run_label(lambda), gap <= 1e-4,
               {{"sup_inventory_gap", gap}, {"tolerance", 1e-4}, {"qp_active_bounds", qp.report.active_bounds.size()}});
  }

  const VolumeProfile mc_profile = build_profile(cfg, cfg.monte_carlo.grid_n);
  const SimulationConfig sim = simulation_config(cfg, mc_profile.grid(), mc_profile, 0.0);
  const double lambda_max = *std::max_element(cfg.lambdas.begin(), cfg.lambdas.end());
  std::vector<NamedStrategy> strategies{
      {"twap", twap_strategy(mc_profile.grid(), cfg.Phi)},
      {"vwap", vwap_strategy(mc_profile, cfg.Phi)},
      {"optimal_" + run_label(lambda_max),
       solve_qp_deterministic(mc_profile, lambda_max, cfg.market, cfg.Phi, {cfg.nonnegative}).strategy}};

  MarketParams analytic = cfg.market;
  analytic.kappa_tilde *= cfg.hooks.variance_kappa_tilde_scale;
  for (const auto& [name, s] : strategies) {
    const auto moments = estimate_cost_moments(s, sim);
    const double expectation = expected_cost(s, mc_profile, cfg.market);
    const double variance = mv_deterministic(s, mc_profile, 0.0, analytic).variance;
    auto mean = within_se(moments.mean, expectation, moments.std_error_mean);
    checks.add("mc_mean_" + name, z_ok(mean), mean);
    auto var = within_se(moments.variance, variance, moments.std_error_variance);
    checks.add("mc_variance_" + name, z_ok(var), var);
  }

  // Path-wise bookkeeping and the VWAP slippage identity.
  SimulationConfig small = sim;
  small.n_paths = std::min<std::size_t>(sim.n_paths, 1000);
  const JointPaths paths = simulate_joint_paths(small);
  const Strategy vwap = vwap_strategy(mc_profile, cfg.Phi);
  double worst_cost = 0.0, worst_slippage = 0.0;
  std::vector<double> finals(small.n_paths);
  for (std::size_t p = 0; p < small.n_paths; ++p) {
    for (const auto& named : strategies) {
      const auto& s = named.strategy;
      const auto c = realized_is_cost(paths.price_path(p), paths.volume_path(p), s, cfg.market);
      const double sum = c.permanent + c.temporary + c.price_risk;
      const double scale = std::max(std::abs(c.total),
                                    std::abs(c.permanent) + std::abs(c.temporary) + std::abs(c.price_risk));
      worst_cost = std::max(worst_cost, std::abs(c.total - sum) / scale);
    }
    worst_slippage = std::max(worst_slippage, std::abs(vwap_slippage(paths.price_path(p), paths.volume_path(p), vwap)));
    finals[p] = paths.price_path(p).back();
  }
  checks.add("cost_decomposition_pathwise", worst_cost <= 1e-8,
             {{"max_relative_gap", worst_cost}, {"tolerance", 1e-8}, {"paths", small.n_paths}});
  checks.add("vwap_slippage_zero", worst_slippage <= 1e-10,
             {{"max_abs_slippage", worst_slippage}, {"tolerance", 1e-10}, {"paths", small.n_paths}});
  const auto fm = estimate_moments(finals);
  auto mart = within_se(fm.mean, cfg.market.s0, fm.std_error_mean);
  checks.add("price_martingale", z_ok(mart), mart);
}

void validate_gbm(const RunConfig& cfg, CheckList& checks) {
  const TimeGrid grid = build_grid(cfg.horizon, cfg.grid_n);
  const double rho0 = cfg.rhos.front();

  const auto neutral = solve_sqp_gbm(build_model(cfg, rho0), grid, 0.0, cfg.market, cfg.Phi);
  const VolumeProfile u = gbm_harmonic_mean(build_model(cfg, rho0), grid);
  const double gap0 = relative_sup(neutral.interval_rates, vwap_interval_rates(u, cfg.Phi));
  checks.add("risk_neutral_optimum_is_expected_vwap", gap0 <= 1e-6, {{"relative_sup_gap", gap0}, {"tolerance", 1e-6}});

  for (double rho : cfg.rhos)
    for (double lambda : cfg.lambdas) {
      const auto opt = solve_sqp_gbm(build_model(cfg, rho), grid, lambda, cfg.market, cfg.Phi);
      const bool ok = opt.report.status == SolveStatus::converged && opt.report.kkt_residual <= 1e-8 &&
                      opt.report.iterations <= 200;
      checks.add("sqp_converged_" + run_label(lambda, &rho), ok,
                 {{"kkt_residual", opt.report.kkt_residual},
                  {"iterations", opt.report.iterations},
                  {"tolerance", 1e-8},
                  {"variance_nonnegative", opt.value.variance >= 0.0}});
    }

  for (double rho : cfg.rhos) {
    const GbmVolumeModel model = build_model(cfg, rho);
    for (const auto& [name, s] : std::vector<NamedStrategy>{{"twap", twap_strategy(grid, cfg.Phi)},
                                                             {"expected_vwap", expected_vwap_strategy(model, grid, cfg.Phi)}}) {
      const auto inv = inventory_from_rate(s);
      const double reduced = cross_moment_reduced(s, inv, model);
      const double quadrature = cross_moment_gauss_hermite(s, inv, model);
      const double gap = reduced == 0.0 ? std::abs(quadrature) : std::abs(quadrature - reduced) / std::abs(reduced);
      checks.add("cross_moment_quadrature_" + name + "_rho" + short_number(rho), gap <= 1e-6,
                 {{"reduced", reduced}, {"gauss_hermite", quadrature}, {"relative_gap", gap}, {"tolerance", 1e-6}});
    }
  }

  if (cfg.volume.gbm.sigma == 0.0) {
    const std::string reason = "volume volatility is zero; turnover is deterministic";
    checks.skip("mc_variance", reason);
    checks.skip("mc_mean", reason);
    checks.skip("theorem_orderings", reason);
    const GbmVolumeModel model = build_model(cfg, rho0);
    const Strategy s = twap_strategy(grid, cfg.Phi);
    const double a = mv_gbm(s, model, 0.0, cfg.market).variance;
    const double b = mv_deterministic(s, u, 0.0, cfg.market).variance;
    checks.add("zero_volatility_variance_reduces", std::abs(a - b) <= 1e-12 * std::abs(b),
               {{"gbm_variance", a}, {"deterministic_variance", b}});
    return;
  }

  const TimeGrid mc_grid = build_grid(cfg.horizon, cfg.monte_carlo.grid_n);
  MarketParams analytic = cfg.market;
  analytic.kappa_tilde *= cfg.hooks.variance_kappa_tilde_scale;
  for (double rho : cfg.rhos) {
    const GbmVolumeModel model = build_model(cfg, rho);
    const SimulationConfig sim = simulation_config(cfg, mc_grid, model, rho);
    for (const auto& [name, s] : std::vector<NamedStrategy>{{"twap", twap_strategy(mc_grid, cfg.Phi)},
                                                             {"expected_vwap", expected_vwap_strategy(model, mc_grid, cfg.Phi)}}) {
      const auto moments = estimate_cost_moments(s, sim);
      const double variance = mv_gbm(s, model, 0.0, analytic).variance;
      const double expectation = expected_cost(s, model, cfg.market);
      const std::string tag = name + "_rho" + short_number(rho);
      auto var = within_se(moments.variance, variance, moments.std_error_variance);
      checks.add("mc_variance_" + tag, z_ok(var), var);
      auto mean = within_se(moments.mean, expectation, moments.std_error_mean);
      checks.add("mc_mean_" + tag, z_ok(mean), mean);
    }
  }

  // Risk-neutral orderings are stated for independent price and volume noise.
  const GbmVolumeModel model = build_model(cfg, 0.0);
  const SimulationConfig sim = simulation_config(cfg, mc_grid, model, 0.0);
  std::vector<NamedStrategy> candidates{{"twap", twap_strategy(mc_grid, cfg.Phi)},
                                        {"expected_vwap", expected_vwap_strategy(model, mc_grid, cfg.Phi)},
                                        {"front_loaded", shaped_strategy(mc_grid, cfg.Phi, -1.0)},
                                        {"back_loaded", shaped_strategy(mc_grid, cfg.Phi, 1.0)}};
  const auto ordering = validate_theorem_orderings(sim, candidates, 1);
  checks.add("expected_vwap_minimal_among_static", ordering.reference_minimal, {{"report", ordering}});
  checks.add("anticipating_vwap_beats_static", ordering.anticipating_le_all,
             {{"anticipating", ordering.anticipating}});
  checks.add("anticipating_vwap_strictly_better", ordering.anticipating_strictly_better,
             {{"impact_gap", ordering.anticipating.impact_gap},
              {"impact_gap_std_error", ordering.anticipating.impact_gap_std_error}});
}

}  // namespace

CommandResult cmd_validate(const RunConfig& cfg, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  CheckList checks;
  if (cfg.problem == ProblemKind::deterministic) validate_deterministic(cfg, checks);
  else validate_gbm(cfg, checks);

  const std::size_t failed = checks.count("fail");
  json report = {{"schema_version", kSchemaVersion},
                 {"config", config_record(cfg)},
                 {"checks", checks.items},
                 {"passed", checks.count("pass")},
                 {"failed", failed},
                 {"skipped", checks.count("skipped")},
                 {"all_passed", failed == 0}};
  write_json(out_dir / "validate.json", report);

  CommandResult result;
  result.exit_code = failed == 0 ? kOk : kChecksFailed;
  json failures = json::array();
  for (const auto& c : checks.items)
    if (c["status"] == "fail") failures.push_back(c["name"]);
  result.summary = {{"command", "validate"},
                    {"passed", report["passed"]},
                    {"failed", failed},
                    {"skipped", report["skipped"]},
                    {"failures", failures},
                    {"report", (out_dir / "validate.json").string()}};
  return result;
}

// expand ----------------------------------------------------------------------

CommandResult cmd_expand(const RunConfig& cfg, const fs::path& out_dir) {
  if (cfg.problem != ProblemKind::deterministic)
    throw std::invalid_argument("expand: the expansion is defined for deterministic volume only");
  fs::create_directories(out_dir);
  const VolumeProfile profile = build_profile(cfg, cfg.grid_n);
  const TimeGrid& grid = profile.grid();
  const auto base = asymptotic_expansion(profile, cfg.market, 0.0, cfg.Phi);

  CsvTable nodes{{"t", "zeta0", "zeta1", "phi1"}, {}};
  for (std::size_t i = 0; i < grid.size(); ++i)
    nodes.rows.push_back({grid.node(i), base.zeroth.zeta[i], base.first_order_rate[i], base.first_order_inventory[i]});
  write_csv(out_dir / "expansion_nodes.csv", nodes);

  CsvTable cells{{"t_mid", "zeta0", "zeta1"}, {}};
  for (std::size_t i = 0; i < grid.steps(); ++i)
    cells.rows.push_back({0.5 * (grid.node(i) + grid.node(i + 1)), base.zeroth_interval_rates[i],
                          base.first_order_interval_rates[i]});

  json curves = json::array();
  for (double lambda : cfg.lambdas) {
    const auto exp = asymptotic_expansion(profile, cfg.market, lambda, cfg.Phi);
    const auto qp = solve_qp_deterministic(profile, lambda, cfg.market, cfg.Phi, {cfg.nonnegative});
    const std::string label = run_label(lambda);
    cells.columns.push_back("composite_" + label);
    cells.columns.push_back("qp_" + label);
    for (std::size_t i = 0; i < grid.steps(); ++i) {
      cells.rows[i].push_back(exp.composite_interval_rates[i]);
      cells.rows[i].push_back(qp.interval_rates[i]);
    }
    const double err = sup_gap(exp.composite_interval_rates, qp.interval_rates);
    const double move = sup_gap(qp.interval_rates, base.zeroth_interval_rates);
    json c = {{"label", label},
              {"lambda", lambda},
              {"max_composite_minus_qp", err},
              {"max_qp_minus_vwap", move},
              {"composite_equals_vwap", exp.composite_interval_rates == base.zeroth_interval_rates}};
    c["relative_error"] = lambda > 0.0 && move > 0.0 ? json(err / move) : json(nullptr);
    curves.push_back(std::move(c));
  }
  write_csv(out_dir / "expansion.csv", cells);
  json report = {{"schema_version", kSchemaVersion}, {"config", config_record(cfg)}, {"curves", curves}};
  write_json(out_dir / "expansion.json", report);
  return {kOk, {{"command", "expand"}, {"curves", curves}, {"csv", (out_dir / "expansion.csv").string()}}};
}

// simulate --------------------------------------------------------------------

CommandResult cmd_simulate(const RunConfig& cfg, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const TimeGrid grid = build_grid(cfg.horizon, cfg.monte_carlo.grid_n);
  json entries = json::array();

  auto run = [&](const std::string& name, const Strategy& s, const SimulationConfig& sim, const MvValue& analytic) {
    const auto costs = simulate_costs(s, sim);
    const auto moments = estimate_moments(costs);
    entries.push_back({{"name", name}, {"rho", sim.rho}, {"moments", moments}, {"analytic", analytic}});
    if (cfg.monte_carlo.dump_paths) {
      CsvTable t{{"path_id", "cost"}, {}};
      for (std::size_t p = 0; p < costs.size(); ++p) t.rows.push_back({static_cast<double>(p), costs[p]});
      write_csv(out_dir / ("costs_" + name + ".csv"), t);
    }
  };

  if (cfg.problem == ProblemKind::deterministic) {
    const VolumeProfile profile = build_profile(cfg, cfg.monte_carlo.grid_n);
    const SimulationConfig sim = simulation_config(cfg, grid, profile, 0.0);
    run("twap", twap_strategy(grid, cfg.Phi), sim, mv_deterministic(twap_strategy(grid, cfg.Phi), profile, 0.0, cfg.market));
    run("vwap", vwap_strategy(profile, cfg.Phi), sim, mv_deterministic(vwap_strategy(profile, cfg.Phi), profile, 0.0, cfg.market));
    for (double lambda : cfg.lambdas) {
      const auto opt = solve_qp_deterministic(profile, lambda, cfg.market, cfg.Phi, {cfg.nonnegative});
      run("optimal_" + run_label(lambda), opt.strategy, sim, mv_deterministic(opt.strategy, profile, lambda, cfg.market));
    }
  } else {
    for (double rho : cfg.rhos) {
      const GbmVolumeModel model = build_model(cfg, rho);
      const SimulationConfig sim = simulation_config(cfg, grid, model, rho);
      const std::string tag = "_rho" + short_number(rho);
      const Strategy twap = twap_strategy(grid, cfg.Phi);
      const Strategy evwap = expected_vwap_strategy(model, grid, cfg.Phi);
      run("twap" + tag, twap, sim, mv_gbm(twap, model, 0.0, cfg.market));
      run("expected_vwap" + tag, evwap, sim, mv_gbm(evwap, model, 0.0, cfg.market));
      for (double lambda : cfg.lambdas) {
        const auto opt = solve_sqp_gbm(model, grid, lambda, cfg.market, cfg.Phi);
        require_converged(opt.report, run_label(lambda, &rho));
        run("optimal_" + run_label(lambda, &rho), opt.strategy, sim, mv_gbm(opt.strategy, model, lambda, cfg.market));
      }
    }
  }
  json report = {{"schema_version", kSchemaVersion}, {"config", config_record(cfg)}, {"estimates", entries}};
  write_json(out_dir / "simulate.json", report);
  return {kOk, {{"command", "simulate"}, {"estimates", entries.size()}, {"report", (out_dir / "simulate.json").string()}}};
}

}  // namespace vwapexec::cli
