#include "vwapexec_cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "vwapexec/io.hpp"

namespace vwapexec::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

const char* problem_name(ProblemKind k) { return k == ProblemKind::gbm ? "gbm" : "deterministic"; }

}  // namespace

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!(Phi > 0.0)) fail("Phi must be positive");
  if (!(horizon > 0.0)) fail("horizon must be positive");
  if (grid_n < 3) fail("grid_n must be at least 3");
  if (lambdas.empty()) fail("lambdas must not be empty");
  for (double l : lambdas)
    if (!(l >= 0.0) || !std::isfinite(l)) fail("lambdas must be nonnegative");
  if (rhos.empty()) fail("rhos must not be empty");
  for (double r : rhos)
    if (!(std::abs(r) <= 1.0)) fail("rhos must lie in [-1, 1]");
  try {
    market.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (monte_carlo.n_paths < 2) fail("monte_carlo.n_paths must be at least 2");
  if (monte_carlo.grid_n < 3) fail("monte_carlo.grid_n must be at least 3");
  if (monte_carlo.antithetic && monte_carlo.n_paths % 2) fail("monte_carlo.n_paths must be even with antithetic");
  if (!(hooks.variance_kappa_tilde_scale > 0.0)) fail("test_hooks.variance_kappa_tilde_scale must be positive");

  const bool gbm_volume = volume.kind == "gbm";
  if (problem == ProblemKind::gbm && !gbm_volume) fail("gbm problem needs volume.kind = gbm");
  if (problem == ProblemKind::deterministic && gbm_volume) fail("deterministic problem cannot use gbm volume");
  if (volume.kind == "arcsine" && horizon != 1.0) fail("arcsine volume needs horizon 1");
  if (volume.kind == "constant" && !(volume.constant > 0.0)) fail("volume.v must be positive");
  if (volume.kind == "samples" && !std::filesystem::exists(volume.samples_file))
    fail("samples file not found: " + volume.samples_file.string());
  if (gbm_volume && (!(volume.gbm.v0 > 0.0) || !(volume.gbm.sigma >= 0.0) || !std::isfinite(volume.gbm.mu)))
    fail("gbm volume needs v0 > 0, sigma >= 0 and finite mu");
  if (volume.kind != "arcsine" && volume.kind != "constant" && volume.kind != "samples" && !gbm_volume)
    fail("unknown volume kind '" + volume.kind + "'");
}

RunConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"schema_version", "name", "problem", "volume", "market", "Phi", "horizon", "lambdas", "rhos",
                  "grid_n", "nonnegative", "monte_carlo", "test_hooks", "output_dir"},
                 "config");
  if (!j.contains("schema_version")) throw ConfigError("config: missing schema_version");
  int version = 0;
  read(j, "schema_version", version, "config");
  if (version != kSchemaVersion)
    throw ConfigError("config: unsupported schema_version " + std::to_string(version) + " (expected " +
                      std::to_string(kSchemaVersion) + ")");

  RunConfig cfg;
  read(j, "name", cfg.name, "config");
  std::string problem = "deterministic";
  read(j, "problem", problem, "config");
  if (problem == "deterministic") cfg.problem = ProblemKind::deterministic;
  else if (problem == "gbm") cfg.problem = ProblemKind::gbm;
  else throw ConfigError("config.problem: expected deterministic or gbm, got '" + problem + "'");

  if (j.contains("volume")) {
    const json& v = j.at("volume");
    reject_unknown(v, {"kind", "v", "file", "v0", "mu", "sigma"}, "volume");
    read(v, "kind", cfg.volume.kind, "volume");
    read(v, "v", cfg.volume.constant, "volume");
    std::string file;
    read(v, "file", file, "volume");
    if (!file.empty()) {
      std::filesystem::path p(file);
      cfg.volume.samples_file = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
    }
    read(v, "v0", cfg.volume.gbm.v0, "volume");
    read(v, "mu", cfg.volume.gbm.mu, "volume");
    read(v, "sigma", cfg.volume.gbm.sigma, "volume");
  }
  if (j.contains("market")) {
    const json& m = j.at("market");
    reject_unknown(m, {"kappa", "kappa_tilde", "sigma_tilde", "s0"}, "market");
    read(m, "kappa", cfg.market.kappa, "market");
    read(m, "kappa_tilde", cfg.market.kappa_tilde, "market");
    read(m, "sigma_tilde", cfg.market.sigma_tilde, "market");
    read(m, "s0", cfg.market.s0, "market");
  }
  read(j, "Phi", cfg.Phi, "config");
  read(j, "horizon", cfg.horizon, "config");
  read(j, "lambdas", cfg.lambdas, "config");
  read(j, "rhos", cfg.rhos, "config");
  read(j, "grid_n", cfg.grid_n, "config");
  read(j, "nonnegative", cfg.nonnegative, "config");
  if (j.contains("monte_carlo")) {
    const json& m = j.at("monte_carlo");
    reject_unknown(m, {"n_paths", "seed", "grid_n", "antithetic", "threads", "dump_paths"}, "monte_carlo");
    read(m, "n_paths", cfg.monte_carlo.n_paths, "monte_carlo");
    read(m, "seed", cfg.monte_carlo.seed, "monte_carlo");
    read(m, "grid_n", cfg.monte_carlo.grid_n, "monte_carlo");
    read(m, "antithetic", cfg.monte_carlo.antithetic, "monte_carlo");
    read(m, "threads", cfg.monte_carlo.threads, "monte_carlo");
    read(m, "dump_paths", cfg.monte_carlo.dump_paths, "monte_carlo");
  }
  if (j.contains("test_hooks")) {
    const json& h = j.at("test_hooks");
    reject_unknown(h, {"variance_kappa_tilde_scale"}, "test_hooks");
    read(h, "variance_kappa_tilde_scale", cfg.hooks.variance_kappa_tilde_scale, "test_hooks");
  }
  std::string out;
  read(j, "output_dir", out, "config");
  if (!out.empty()) cfg.output_dir = out;
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

json config_to_json(const RunConfig& cfg) {
  json volume = {{"kind", cfg.volume.kind}};
  if (cfg.volume.kind == "constant") volume["v"] = cfg.volume.constant;
  if (cfg.volume.kind == "samples") volume["file"] = cfg.volume.samples_file.string();
  if (cfg.volume.kind == "gbm") {
    volume["v0"] = cfg.volume.gbm.v0;
    volume["mu"] = cfg.volume.gbm.mu;
    volume["sigma"] = cfg.volume.gbm.sigma;
  }
  return {{"schema_version", kSchemaVersion},
          {"name", cfg.name},
          {"problem", problem_name(cfg.problem)},
          {"volume", volume},
          {"market",
           {{"kappa", cfg.market.kappa},
            {"kappa_tilde", cfg.market.kappa_tilde},
            {"sigma_tilde", cfg.market.sigma_tilde},
            {"s0", cfg.market.s0}}},
          {"Phi", cfg.Phi},
          {"horizon", cfg.horizon},
          {"lambdas", cfg.lambdas},
          {"rhos", cfg.rhos},
          {"grid_n", cfg.grid_n},
          {"nonnegative", cfg.nonnegative},
          {"monte_carlo",
           {{"n_paths", cfg.monte_carlo.n_paths},
            {"seed", cfg.monte_carlo.seed},
            {"grid_n", cfg.monte_carlo.grid_n},
            {"antithetic", cfg.monte_carlo.antithetic},
            {"threads", cfg.monte_carlo.threads},
            {"dump_paths", cfg.monte_carlo.dump_paths}}},
          {"test_hooks", {{"variance_kappa_tilde_scale", cfg.hooks.variance_kappa_tilde_scale}}},
          {"output_dir", cfg.output_dir.string()}};
}

RunConfig preset(const std::string& name) {
  RunConfig cfg;
  cfg.name = name;
  if (name == "fig1") {
    cfg.problem = ProblemKind::deterministic;
    cfg.volume.kind = "arcsine";
    cfg.market.sigma_tilde = 0.1;
    cfg.market.kappa_tilde = 0.02;
    cfg.lambdas = {0.0, 0.5, 1.0, 2.0};
    cfg.grid_n = 1000;
  } else if (name == "fig2" || name == "fig3") {
    cfg.problem = ProblemKind::gbm;
    cfg.volume.kind = "gbm";
    cfg.volume.gbm = GbmVolumeModel{1.0, -0.02, 0.2, 0.0};
    cfg.market.sigma_tilde = 0.2;
    cfg.market.kappa_tilde = 0.02;
    cfg.grid_n = 200;
    if (name == "fig2") {
      cfg.lambdas = {0.0, 0.5, 1.0, 2.0};
      cfg.rhos = {0.0};
    } else {
      cfg.lambdas = {10.0};
      cfg.rhos = {-0.9, -0.3, 0.0, 0.3, 0.9};
    }
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected fig1, fig2 or fig3)");
  }
  cfg.output_dir = "out/" + name;
  cfg.validate();
  return cfg;
}

std::vector<std::string> preset_names() { return {"fig1", "fig2", "fig3"}; }

VolumeProfile build_profile(const RunConfig& cfg, std::size_t n) {
  const TimeGrid grid = build_grid(cfg.horizon, n);
  if (cfg.volume.kind == "arcsine") return arcsine_profile(grid);
  if (cfg.volume.kind == "constant") return constant_profile(grid, cfg.volume.constant);
  if (cfg.volume.kind == "samples") {
    const VolumeProfile raw = profile_from_table(read_csv(cfg.volume.samples_file));
    if (raw.grid().horizon() != cfg.horizon)
      throw ConfigError("samples file horizon differs from config horizon");
    if (raw.grid() == grid) return raw;
    // Linear interpolation onto the requested grid.
    const auto v = raw.v();
    const double h = raw.grid().step();
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.node(i) / h;
      const std::size_t k = std::min(static_cast<std::size_t>(x), raw.grid().steps() - 1);
      const double w = x - static_cast<double>(k);
      out[i] = (1.0 - w) * v[k] + w * v[k + 1];
    }
    return profile_from_samples(grid, out);
  }
  throw std::invalid_argument("build_profile: volume kind '" + cfg.volume.kind + "' is not deterministic");
}

GbmVolumeModel build_model(const RunConfig& cfg, double rho) {
  if (cfg.volume.kind != "gbm") throw std::invalid_argument("build_model: config volume is not gbm");
  GbmVolumeModel m = cfg.volume.gbm;
  m.rho = rho;
  m.validate();
  return m;
}

}  // namespace vwapexec::cli
