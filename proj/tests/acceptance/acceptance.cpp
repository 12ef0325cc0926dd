// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vwapexec/bvp.hpp"
#include "vwapexec/cost.hpp"
#include "vwapexec/montecarlo.hpp"
#include "vwapexec/optimizer.hpp"
#include "vwapexec/quadrature.hpp"
#include "vwapexec/strategy.hpp"

#ifdef VWAPEXEC_WITH_CLI
#include "vwapexec_cli/commands.hpp"
#include "vwapexec_cli/config.hpp"
#endif

using namespace vwapexec;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

const MarketParams kFig1Market{0.1, 0.02, 0.1, 100.0};
const MarketParams kFig2Market{0.1, 0.02, 0.2, 100.0};
GbmVolumeModel fig2_model(double rho = 0.0) { return GbmVolumeModel{1.0, -0.02, 0.2, rho}; }

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double sup_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Interval rates proportional to cell-average turnover.
std::vector<double> proportional_rates(const VolumeProfile& p, double Phi) {
  std::vector<double> r(p.grid().steps());
  for (std::size_t i = 1; i <= r.size(); ++i) r[i - 1] = p.cell_average(i) * Phi / p.total();
  return r;
}

double relative_sup(std::span<const double> a, std::span<const double> ref) {
  double scale = 0.0;
  for (double x : ref) scale = std::max(scale, std::abs(x));
  return sup_diff(a, ref) / scale;
}

VolumeProfile random_profile(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto g = build_grid(1.0, n);
  const double base = 0.5 + 2.0 * u(rng), a1 = 0.8 * u(rng), a2 = 0.4 * u(rng);
  const double p1 = 6.28 * u(rng), p2 = 6.28 * u(rng);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t = g.node(i);
    v[i] = base * (1.0 + 0.9 * a1 * std::sin(6.28 * t + p1) + 0.9 * a2 * std::cos(12.57 * t + p2));
  }
  return profile_from_samples(g, v);
}

Outcome risk_neutral_deterministic() {
  std::mt19937_64 rng(20240607);
  std::vector<VolumeProfile> profiles{arcsine_profile(build_grid(1.0, 500))};
  for (int k = 0; k < 5; ++k) profiles.push_back(random_profile(500, rng));
  double worst = 0.0;
  for (const auto& p : profiles) {
    const auto sol = solve_qp_deterministic(p, 0.0, kFig1Market, 1.0);
    if (sol.report.status != SolveStatus::converged) return {false, "QP did not converge"};
    worst = std::max(worst, relative_sup(sol.interval_rates, proportional_rates(p, 1.0)));
  }
  return {worst <= 1e-8, fmt("max relative sup gap %.3g over 6 profiles (tol 1e-8)", worst)};
}

Outcome risk_neutral_gbm() {
  const auto g = build_grid(1.0, 200);
  const auto sol = solve_sqp_gbm(fig2_model(), g, 0.0, kFig2Market, 1.0);
  const double gap = relative_sup(sol.interval_rates, proportional_rates(gbm_harmonic_mean(fig2_model(), g), 1.0));

  const SimulationConfig cfg{build_grid(1.0, 100), kFig2Market, fig2_model(), 0.0, 100000, 20240607};
  const auto& mg = cfg.grid;
  auto tilted = [&](double slope) {
    std::vector<double> z(mg.size());
    for (std::size_t i = 0; i < mg.size(); ++i) z[i] = 1.0 + slope * (mg.node(i) - 0.5);
    return Strategy{mg, z, 1.0, std::nullopt};
  };
  const std::vector<NamedStrategy> candidates{{"twap", twap_strategy(mg, 1.0)},
                                              {"expected_vwap", expected_vwap_strategy(fig2_model(), mg, 1.0)},
                                              {"front_loaded", tilted(-1.0)},
                                              {"back_loaded", tilted(1.0)},
                                              {"mean_variance_lambda2", solve_sqp_gbm(fig2_model(), mg, 2.0,
                                                                                      kFig2Market, 1.0)
                                                                            .strategy}};
  const auto r = validate_theorem_orderings(cfg, candidates, 1);
  double worst_z = -1e300;
  for (const auto& e : r.candidates)
    if (e.gap_std_error > 0.0) worst_z = std::max(worst_z, -e.mean_gap / e.gap_std_error);
  const bool ok = gap <= 1e-6 && r.reference_minimal && sol.report.status == SolveStatus::converged;
  return {ok, fmt("SQP gap %.3g (tol 1e-6); tournament: expected-VWAP minimal, worst z %.2f (limit 3)", gap, worst_z)};
}

double sinh_gap(std::size_t n, double lambda) {
  const auto g = build_grid(1.0, n);
  const auto ode = optimal_inventory_ode(constant_profile(g, 1.0), lambda, kFig1Market, 1.0);
  return sup_diff(ode.inventory.phi, ac_closed_form_inventory(lambda, kFig1Market, 1.0, g, 1.0).phi);
}

Outcome bvp_closed_form() {
  const double lambda = 20.0;
  const double e250 = sinh_gap(250, lambda), e500 = sinh_gap(500, lambda), e1000 = sinh_gap(1000, lambda);
  const double order = std::min(std::log2(e250 / e500), std::log2(e500 / e1000));
  return {e1000 <= 1e-4 && order >= 1.95, fmt("sup gap %.3g at N=1000 (tol 1e-4); order %.3f (min 1.95)", e1000, order)};
}

Outcome bvp_qp() {
  const auto p = arcsine_profile(build_grid(1.0, 1000));
  double worst = 0.0;
  for (double lambda : {0.5, 1.0, 2.0}) {
    const auto ode = optimal_inventory_ode(p, lambda, kFig1Market, 1.0);
    const auto qp = solve_qp_deterministic(p, lambda, kFig1Market, 1.0);
    worst = std::max(worst, sup_diff(ode.inventory.phi, qp.inventory.phi));
  }
  return {worst <= 1e-4, fmt("max sup inventory gap %.3g (tol 1e-4)", worst)};
}

Outcome figure1() {
  const auto g = build_grid(1.0, 1000);
  const auto p = arcsine_profile(g);
  std::vector<double> z;
  for (double lambda : {0.0, 0.5, 1.0, 2.0}) z.push_back(solve_qp_deterministic(p, lambda, kFig1Market, 1.0).strategy.zeta[50]);
  const bool ok = z[0] < z[1] && z[1] < z[2] && z[2] < z[3];
  return {ok, fmt("zeta(0.05) = %.6f -> %.6f -> ... -> %.6f", z[0], z[1], z[3])};
}

Outcome figures2_3() {
  const auto g = build_grid(1.0, 200);
  bool converged = true;
  double worst_kkt = 0.0;
  std::size_t worst_iter = 0;
  auto solve = [&](double lambda, double rho) {
    const auto sol = solve_sqp_gbm(fig2_model(rho), g, lambda, kFig2Market, 1.0);
    converged = converged && sol.report.status == SolveStatus::converged && sol.report.kkt_residual <= 1e-8 &&
                sol.report.iterations <= 200;
    worst_kkt = std::max(worst_kkt, sol.report.kkt_residual);
    worst_iter = std::max(worst_iter, sol.report.iterations);
    return sol.interval_rates.front();
  };
  std::vector<double> by_lambda, by_rho;
  for (double lambda : {0.0, 0.5, 1.0, 2.0}) by_lambda.push_back(solve(lambda, 0.0));
  for (double rho : {-0.9, -0.3, 0.0, 0.3, 0.9}) by_rho.push_back(solve(10.0, rho));
  bool lambda_up = true, rho_up = true;
  for (std::size_t k = 1; k < by_lambda.size(); ++k) lambda_up = lambda_up && by_lambda[k] > by_lambda[k - 1];
  for (std::size_t k = 1; k < by_rho.size(); ++k) rho_up = rho_up && by_rho[k] >= by_rho[k - 1];
  const double rho_spread = by_rho.back() - by_rho.front();
  const double lambda_spread = by_rho[2] - by_lambda[0];
  const bool ok = converged && lambda_up && rho_up && rho_spread < 0.5 * lambda_spread;
  return {ok, fmt("rho spread %.4g vs lambda spread %.4g; max KKT %.2g", rho_spread, lambda_spread, worst_kkt) +
                  " in <= " + std::to_string(worst_iter) + " iterations"};
}

Outcome variance_formula() {
  double worst_z = 0.0, worst_gh = 0.0;
  for (double rho : {0.0, 0.9}) {
    const auto model = fig2_model(rho);
    const SimulationConfig cfg{build_grid(1.0, 200), kFig2Market, model, rho, 100000, 7};
    for (const auto& s : {twap_strategy(cfg.grid, 1.0), expected_vwap_strategy(model, cfg.grid, 1.0)}) {
      const auto mc = estimate_cost_moments(s, cfg);
      const double analytic = mv_gbm(s, model, 0.0, kFig2Market).variance;
      worst_z = std::max(worst_z, std::abs(mc.variance - analytic) / mc.std_error_variance);
      if (rho != 0.0) {
        const auto inv = inventory_from_rate(s);
        const double a = cross_moment_reduced(s, inv, model), b = cross_moment_gauss_hermite(s, inv, model);
        worst_gh = std::max(worst_gh, std::abs(a - b) / std::abs(a));
      }
    }
  }
  return {worst_z <= 3.0 && worst_gh <= 1e-6,
          fmt("max |z| %.2f (limit 3); Gauss-Hermite relative gap %.3g (tol 1e-6)", worst_z, worst_gh)};
}

Outcome expansion() {
  const auto p = arcsine_profile(build_grid(1.0, 1000));
  auto error = [&](double lambda) {
    const auto e = asymptotic_expansion(p, kFig1Market, lambda, 1.0);
    const auto qp = solve_qp_deterministic(p, lambda, kFig1Market, 1.0);
    std::vector<double> q(qp.interval_rates.size());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = (qp.interval_rates[i] - e.zeroth_interval_rates[i]) / lambda;
    return sup_diff(q, e.first_order_interval_rates);
  };
  const double big = error(1e-2), small = error(1e-3);
  return {small / big <= 0.5, fmt("error %.3g at 1e-2, %.3g at 1e-3, ratio %.3f (max 0.5)", big, small, small / big)};
}

Outcome bookkeeping() {
  double worst_cost = 0.0, worst_slip = 0.0;
  auto run = [&](const SimulationConfig& cfg, const std::vector<Strategy>& strategies) {
    const auto paths = simulate_joint_paths(cfg);
    for (std::size_t p = 0; p < paths.n_paths; ++p) {
      const auto price = paths.price_path(p), volume = paths.volume_path(p);
      for (const auto& s : strategies) {
        const auto inv = inventory_from_rate(s);
        const double direct = realized_is_cost_direct(price, volume, s, inv, cfg.market);
        const auto c = realized_is_cost(price, volume, s, cfg.market);
        const double parts = c.permanent + c.temporary + c.price_risk;
        const double scale = std::max(std::abs(direct), std::abs(c.permanent) + std::abs(c.temporary) +
                                                            std::abs(c.price_risk));
        worst_cost = std::max(worst_cost, std::abs(direct - parts) / scale);
      }
      // Volume-proportional execution on this path.
      Strategy vwap{cfg.grid, std::vector<double>(volume.begin(), volume.end()), 1.0, std::nullopt};
      const double total = trapezoid(volume, cfg.grid.step());
      for (double& z : vwap.zeta) z /= total;
      worst_slip = std::max(worst_slip, std::abs(vwap_slippage(price, volume, vwap)));
    }
  };
  const auto g = build_grid(1.0, 200);
  const auto arcsine = arcsine_profile(g);
  run(SimulationConfig{g, kFig1Market, arcsine, 0.0, 1000, 11},
      {twap_strategy(g, 1.0), vwap_strategy(arcsine, 1.0), solve_qp_deterministic(arcsine, 2.0, kFig1Market, 1.0).strategy});
  run(SimulationConfig{g, kFig2Market, fig2_model(0.5), 0.5, 1000, 12},
      {twap_strategy(g, 1.0), expected_vwap_strategy(fig2_model(0.5), g, 1.0),
       solve_sqp_gbm(fig2_model(0.5), g, 10.0, kFig2Market, 1.0).strategy});
  return {worst_cost <= 1e-8 && worst_slip <= 1e-10,
          fmt("max relative cost gap %.3g (tol 1e-8); max |slippage| %.3g (tol 1e-10)", worst_cost, worst_slip)};
}

Outcome determinism() {
#ifdef VWAPEXEC_WITH_CLI
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "vwapexec_acceptance";
  fs::remove_all(root);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  bool same = true;
  std::size_t bytes = 0;
  for (const char* name : {"fig1", "fig2"}) {
    auto cfg = cli::preset(name);
    cfg.monte_carlo.threads = 1;
    const auto a = cli::cmd_validate(cfg, root / name / "a");
    cfg.monte_carlo.threads = 0;
    const auto b = cli::cmd_validate(cfg, root / name / "b");
    const std::string ja = slurp(root / name / "a" / "validate.json");
    same = same && a.exit_code == 0 && b.exit_code == 0 && !ja.empty() && ja == slurp(root / name / "b" / "validate.json");
    bytes += ja.size();
  }
  return {same, "validate reports for fig1 and fig2 byte-identical across runs (" + std::to_string(bytes) + " bytes)"};
#else
  return {false, "built without the command-line tool"};
#endif
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"risk-neutral optimum equals VWAP (deterministic volume)", risk_neutral_deterministic},
      {"risk-neutral optimum equals expected VWAP (GBM volume)", risk_neutral_gbm},
      {"boundary-value solver matches sinh closed form", bvp_closed_form},
      {"boundary-value solver matches QP optimum", bvp_qp},
      {"arcsine volume: early speed increases with risk aversion", figure1},
      {"GBM volume: early speed increases with risk aversion and correlation", figures2_3},
      {"GBM variance formula against simulation", variance_formula},
      {"first-order expansion converges", expansion},
      {"cost bookkeeping and VWAP slippage", bookkeeping},
      {"validate reports are deterministic", determinism},
  };
  const double limits[] = {5.0, 0.0, 0.0, 10.0, 0.0, 0.0, 60.0, 0.0, 0.0, 0.0};
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (limits[k] > 0.0 && secs > limits[k]) {
      o.pass = false;
      o.detail += fmt(" [over the %.0f s budget]", limits[k]);
    }
    failures += o.pass ? 0 : 1;
    std::printf("criterion %2zu: %s  %s: %s (%.2f s)\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
