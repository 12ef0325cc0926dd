#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vwapexec/market.hpp"
#include "vwapexec/volume.hpp"

namespace vwapexec::cli {

inline constexpr int kSchemaVersion = 1;

// Anything wrong with a config file or preset name. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ProblemKind { deterministic, gbm };

struct VolumeSpec {
  std::string kind = "arcsine";  // arcsine | constant | samples | gbm
  double constant = 1.0;
  std::filesystem::path samples_file;
  GbmVolumeModel gbm{};  // rho is taken from the rho list
};

struct MonteCarloSettings {
  std::size_t n_paths = 100000;
  std::uint64_t seed = 20240607;
  std::size_t grid_n = 200;
  bool antithetic = false;
  unsigned threads = 0;
  bool dump_paths = false;
};

struct TestHooks {
  // Multiplies kappa_tilde inside the analytic variance used by `validate`.
  double variance_kappa_tilde_scale = 1.0;
};

struct RunConfig {
  std::string name = "custom";
  ProblemKind problem = ProblemKind::deterministic;
  VolumeSpec volume;
  MarketParams market;
  double Phi = 1.0;
  double horizon = 1.0;
  std::vector<double> lambdas{0.0};
  std::vector<double> rhos{0.0};
  std::size_t grid_n = 1000;
  bool nonnegative = true;
  MonteCarloSettings monte_carlo;
  TestHooks hooks;
  std::filesystem::path output_dir = "out";

  void validate() const;
};

RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const RunConfig& cfg);

/// Built-in parameter sets for the three published figures.
RunConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Profile for a deterministic config on an N-step grid over the horizon.
VolumeProfile build_profile(const RunConfig& cfg, std::size_t n);
/// GBM model for a given correlation.
GbmVolumeModel build_model(const RunConfig& cfg, double rho);

}  // namespace vwapexec::cli
