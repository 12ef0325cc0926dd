#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "vwapexec/io.hpp"
#include "vwapexec_cli/commands.hpp"
#include "vwapexec_cli/config.hpp"

using namespace vwapexec;
using namespace vwapexec::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("vwapexec_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const json* find_check(const json& report, const std::string& name) {
  for (const auto& c : report.at("checks"))
    if (c.at("name") == name) return &c;
  return nullptr;
}

RunConfig small_deterministic() {
  RunConfig cfg = preset("fig1");
  cfg.grid_n = 200;
  cfg.lambdas = {0.0, 1.0};
  cfg.monte_carlo.n_paths = 20000;
  cfg.monte_carlo.grid_n = 50;
  return cfg;
}

RunConfig small_gbm() {
  RunConfig cfg = preset("fig2");
  cfg.grid_n = 50;
  cfg.lambdas = {0.0, 2.0};
  cfg.rhos = {0.0, 0.9};
  cfg.monte_carlo.n_paths = 20000;
  cfg.monte_carlo.grid_n = 50;
  return cfg;
}

}  // namespace

TEST(Config, PresetsMatchShippedFiles) {
  for (const auto& name : preset_names()) {
    const auto file = load_config(fs::path(VWAPEXEC_SOURCE_DIR) / "configs" / (name + ".json"));
    EXPECT_EQ(config_to_json(file), config_to_json(preset(name))) << name;
  }
  EXPECT_EQ(preset_names(), (std::vector<std::string>{"fig1", "fig2", "fig3"}));
  EXPECT_THROW(preset("fig4"), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  const auto cfg = preset("fig3");
  EXPECT_EQ(config_to_json(parse_config(config_to_json(cfg))), config_to_json(cfg));
}

TEST(Config, Rejections) {
  json j = config_to_json(preset("fig1"));
  j["lambda"] = 1;
  EXPECT_THROW(parse_config(j), ConfigError);
  j = config_to_json(preset("fig1"));
  j["schema_version"] = 2;
  EXPECT_THROW(parse_config(j), ConfigError);
  j = config_to_json(preset("fig1"));
  j["lambdas"] = {0.5, -1.0};
  EXPECT_THROW(parse_config(j), ConfigError);
  j = config_to_json(preset("fig1"));
  j["lambdas"] = json::array();
  EXPECT_THROW(parse_config(j), ConfigError);
  j = config_to_json(preset("fig1"));
  j["volume"] = {{"kind", "samples"}, {"file", "no_such_file.csv"}};
  EXPECT_THROW(parse_config(j), ConfigError);
  j = config_to_json(preset("fig2"));
  j["rhos"] = {1.5};
  EXPECT_THROW(parse_config(j), ConfigError);
  j = config_to_json(preset("fig2"));
  j["market"]["kappa_tilde"] = 0.0;
  EXPECT_THROW(parse_config(j), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, SamplesFileIsInterpolatedOntoGrid) {
  const auto dir = scratch("samples");
  {
    std::ofstream out(dir / "curve.csv");
    out << "t,v\n0,2\n0.5,1\n1,2\n";
  }
  {
    std::ofstream out(dir / "cfg.json");
    out << R"({"schema_version": 1, "volume": {"kind": "samples", "file": "curve.csv"}, "grid_n": 4})";
  }
  const auto cfg = load_config(dir / "cfg.json");
  const auto p = build_profile(cfg, 4);
  EXPECT_EQ(std::vector<double>(p.v().begin(), p.v().end()), (std::vector<double>{2.0, 1.5, 1.0, 1.5, 2.0}));
}

TEST(Labels, Format) {
  EXPECT_EQ(run_label(0.5), "lambda0.5");
  const double rho = -0.9;
  EXPECT_EQ(run_label(10.0, &rho), "lambda10_rho-0.9");
  EXPECT_EQ(run_label(0.0), "lambda0");
}

TEST(Solve, DeterministicWritesOneCurvePerLambda) {
  const auto dir = scratch("solve_det");
  auto cfg = small_deterministic();
  cfg.lambdas = {0.0, 0.5, 1.0, 2.0};
  const auto r = cmd_solve(cfg, dir);
  EXPECT_EQ(r.exit_code, kOk);
  for (const char* label : {"lambda0", "lambda0.5", "lambda1", "lambda2"})
    EXPECT_TRUE(fs::exists(dir / ("strategy_" + std::string(label) + ".csv"))) << label;
  const auto report = read_json(dir / "report.json");
  EXPECT_EQ(report.at("runs").size(), 4u);
  EXPECT_LE(report.at("runs")[0].at("vwap_relative_gap").get<double>(), 1e-8);
  EXPECT_FALSE(report.at("config").contains("output_dir"));
  const auto s = strategy_from_table(read_csv(dir / "strategy_lambda0.csv"));
  EXPECT_LE(s.sell_off_error(), 1e-10);
}

TEST(Solve, GbmRiskNeutralCurveIsExpectedVwap) {
  const auto dir = scratch("solve_gbm");
  auto cfg = small_gbm();
  const auto r = cmd_solve(cfg, dir);
  ASSERT_EQ(r.exit_code, kOk);
  EXPECT_TRUE(fs::exists(dir / "strategy_lambda2_rho0.9.csv"));
  const auto s = strategy_from_table(read_csv(dir / "strategy_lambda0_rho0.csv"));
  const auto ev = expected_vwap_strategy(build_model(cfg, 0.0), build_grid(1.0, 50), 1.0);
  for (std::size_t i = 0; i < ev.zeta.size(); ++i) EXPECT_NEAR(s.zeta[i], ev.zeta[i], 1e-6 * ev.zeta[i]);
}

TEST(Validate, DeterministicPasses) {
  const auto dir = scratch("validate_det");
  const auto r = cmd_validate(small_deterministic(), dir);
  EXPECT_EQ(r.exit_code, kOk) << r.summary.dump(2);
  const auto report = read_json(dir / "validate.json");
  EXPECT_TRUE(report.at("all_passed").get<bool>());
  EXPECT_NE(find_check(report, "bvp_matches_qp_lambda1"), nullptr);
  EXPECT_NE(find_check(report, "mc_variance_twap"), nullptr);
}

TEST(Validate, CorruptedImpactCoefficientFailsVarianceCheck) {
  const auto dir = scratch("validate_hook");
  auto cfg = small_gbm();
  cfg.rhos = {0.0};
  cfg.hooks.variance_kappa_tilde_scale = 25.0;
  const auto r = cmd_validate(cfg, dir);
  EXPECT_EQ(r.exit_code, kChecksFailed);
  const auto report = read_json(dir / "validate.json");
  const json* c = find_check(report, "mc_variance_twap_rho0");
  ASSERT_NE(c, nullptr);
  EXPECT_EQ(c->at("status"), "fail");
  EXPECT_EQ(find_check(report, "mc_mean_twap_rho0")->at("status"), "pass");
}

TEST(Validate, GbmPassesAndZeroVolatilitySkipsSimulation) {
  auto cfg = small_gbm();
  const auto r = cmd_validate(cfg, scratch("validate_gbm"));
  EXPECT_EQ(r.exit_code, kOk) << r.summary.dump(2);

  cfg.volume.gbm.sigma = 0.0;
  cfg.volume.gbm.mu = 0.0;
  const auto dir = scratch("validate_flat");
  const auto z = cmd_validate(cfg, dir);
  EXPECT_EQ(z.exit_code, kOk) << z.summary.dump(2);
  const auto report = read_json(dir / "validate.json");
  EXPECT_GT(report.at("skipped").get<int>(), 0);
  const json* skipped = find_check(report, "mc_variance");
  ASSERT_NE(skipped, nullptr);
  EXPECT_EQ(skipped->at("status"), "skipped");
  EXPECT_FALSE(skipped->at("reason").get<std::string>().empty());
  EXPECT_EQ(find_check(report, "zero_volatility_variance_reduces")->at("status"), "pass");
}

TEST(Validate, SameSeedGivesIdenticalReport) {
  auto cfg = small_deterministic();
  cfg.monte_carlo.n_paths = 4000;
  const auto a = scratch("validate_a"), b = scratch("validate_b");
  cmd_validate(cfg, a);
  cfg.monte_carlo.threads = 3;
  cmd_validate(cfg, b);
  EXPECT_EQ(slurp(a / "validate.json"), slurp(b / "validate.json"));
}

TEST(Expand, ArcsineSmallLambda) {
  const auto dir = scratch("expand");
  auto cfg = preset("fig1");
  cfg.lambdas = {0.0, 0.01};
  const auto r = cmd_expand(cfg, dir);
  ASSERT_EQ(r.exit_code, kOk);
  const auto report = read_json(dir / "expansion.json");
  const auto& curves = report.at("curves");
  EXPECT_TRUE(curves[0].at("composite_equals_vwap").get<bool>());
  EXPECT_TRUE(curves[0].at("relative_error").is_null());
  EXPECT_LE(curves[1].at("relative_error").get<double>(), 0.05);
  const auto table = read_csv(dir / "expansion.csv");
  EXPECT_EQ(table.columns.size(), 7u);
  EXPECT_TRUE(fs::exists(dir / "expansion_nodes.csv"));
}

TEST(Expand, ConstantVolumeCorrectionIsCubic) {
  const auto dir = scratch("expand_const");
  auto cfg = preset("fig1");
  cfg.volume.kind = "constant";
  cfg.volume.constant = 1.0;
  cfg.grid_n = 200;
  ASSERT_EQ(cmd_expand(cfg, dir).exit_code, kOk);
  const auto nodes = read_csv(dir / "expansion_nodes.csv");
  const auto t = nodes.column_values("t"), phi1 = nodes.column_values("phi1");
  const double c = cfg.market.risk_weight();
  for (std::size_t i = 0; i < t.size(); ++i)
    EXPECT_NEAR(phi1[i], c * (t[i] * t[i] / 2.0 - t[i] * t[i] * t[i] / 6.0 - t[i] / 3.0), 1e-8);
}

TEST(Expand, RejectsStochasticVolume) {
  EXPECT_THROW(cmd_expand(preset("fig2"), scratch("expand_gbm")), std::invalid_argument);
}

TEST(Simulate, WritesEstimatesAndOptionalDump) {
  const auto dir = scratch("simulate");
  auto cfg = small_deterministic();
  cfg.monte_carlo.n_paths = 1000;
  cfg.monte_carlo.dump_paths = true;
  ASSERT_EQ(cmd_simulate(cfg, dir).exit_code, kOk);
  const auto report = read_json(dir / "simulate.json");
  EXPECT_EQ(report.at("estimates").size(), 4u);  // twap, vwap, one optimum per lambda
  const auto dump = read_csv(dir / "costs_twap.csv");
  EXPECT_EQ(dump.columns, (std::vector<std::string>{"path_id", "cost"}));
  EXPECT_EQ(dump.rows.size(), 1000u);
}
