#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vwapexec/cost.hpp"
#include "vwapexec/grid.hpp"
#include "vwapexec/market.hpp"
#include "vwapexec/strategy.hpp"
#include "vwapexec/volume.hpp"

namespace vwapexec {

using VolumeModel = std::variant<VolumeProfile, GbmVolumeModel>;

struct SimulationConfig {
  TimeGrid grid;
  MarketParams market;
  VolumeModel volume;
  double rho = 0.0;  // correlation of B and B~; GBM only
  std::size_t n_paths = 2;
  std::uint64_t seed = 0;
  // Pairs paths (2k, 2k+1) with sign-flipped Brownian increments.
  bool antithetic = false;
  // 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;

  void validate() const;
};

struct MomentEstimate {
  double mean = 0.0;
  double variance = 0.0;
  double std_error_mean = 0.0;
  double std_error_variance = 0.0;
  std::size_t n_paths = 0;
};

/// Sample mean, unbiased variance, SE of the mean, and SE of the variance
/// from the fourth central moment, sqrt((m4 - s^4) / n).
MomentEstimate estimate_moments(std::span<const double> samples);

/// One simulated path: unaffected price S0 and turnover at each node plus the
/// Brownian increments that built them.
struct PathSample {
  std::vector<double> price;
  std::vector<double> volume;
  std::vector<double> volume_increments;  // dB
  std::vector<double> price_increments;   // dB~ = rho dB + sqrt(1 - rho^2) dW
};

/// Draws path `index` of the configuration; depends only on (seed, index).
void sample_path(const SimulationConfig& cfg, std::size_t index, PathSample& out);

struct JointPaths {
  TimeGrid grid;
  std::size_t n_paths = 0;
  std::vector<double> price;   // n_paths x (N + 1)
  std::vector<double> volume;  // n_paths x (N + 1)
  std::vector<double> volume_increments;
  std::vector<double> price_increments;

  std::span<const double> price_path(std::size_t p) const { return {price.data() + p * grid.size(), grid.size()}; }
  std::span<const double> volume_path(std::size_t p) const { return {volume.data() + p * grid.size(), grid.size()}; }
  std::span<const double> price_driver(std::size_t p) const {
    return {price_increments.data() + p * grid.steps(), grid.steps()};
  }
  std::span<const double> volume_driver(std::size_t p) const {
    return {volume_increments.data() + p * grid.steps(), grid.steps()};
  }
};

JointPaths simulate_joint_paths(const SimulationConfig& cfg);

/// Realized cost of `s` on every simulated path, in path order.
std::vector<double> simulate_costs(const Strategy& s, const SimulationConfig& cfg);

MomentEstimate estimate_cost_moments(const Strategy& s, const SimulationConfig& cfg);

struct OrderingEntry {
  std::string name;
  MomentEstimate cost;
  double mean_gap = 0.0;  // mean(candidate - reference), paired by path
  double gap_std_error = 0.0;
  double impact_gap = 0.0;  // same for the temporary-impact component only
  double impact_gap_std_error = 0.0;
};

struct OrderingReport {
  std::size_t reference = 0;             // index of the expected-VWAP candidate
  std::vector<OrderingEntry> candidates;
  OrderingEntry anticipating;            // per-path zeta = v_t Phi / V_T
  bool anticipating_le_all = false;      // anticipating <= every static, within 3 SE
  bool reference_minimal = false;        // reference <= every static, within 3 SE
  bool anticipating_strictly_better = false;  // impact cost gap < -3 SE against the reference
};

struct NamedStrategy {
  std::string name;
  Strategy strategy;
};

/// Monte Carlo tournament for the risk-neutral optimality statements: the
/// anticipating VWAP against every static candidate, and the reference
/// (expected-VWAP) candidate against the other static ones. Gaps are paired
/// differences over common paths.
OrderingReport validate_theorem_orderings(const SimulationConfig& cfg, const std::vector<NamedStrategy>& candidates,
                                          std::size_t reference);

}  // namespace vwapexec
