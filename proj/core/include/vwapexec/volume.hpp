#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vwapexec/grid.hpp"

namespace vwapexec {

/// Deterministic instantaneous turnover v_t on a grid together with the
/// cumulative integrals the strategies and solvers consume:
///   V_t     = int_0^t v_r dr
///   calV_t  = int_0^t V_r dr
///   V2int_t = int_0^t V_r^2 dr
/// Closed forms are used where the profile has them; otherwise the running
/// trapezoid rule.
class VolumeProfile {
 public:
  VolumeProfile(TimeGrid grid, std::vector<double> v, std::vector<double> cumulative,
                std::vector<double> cumulative_integral, std::vector<double> cumulative_square_integral);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::span<const double> v() const noexcept { return v_; }
  std::span<const double> V() const noexcept { return V_; }
  std::span<const double> calV() const noexcept { return calV_; }
  std::span<const double> V2int() const noexcept { return V2int_; }

  double total() const noexcept { return V_.back(); }

  /// Average turnover over interval i (1..N), (V_i - V_{i-1}) / tau.
  double cell_average(std::size_t i) const noexcept { return (V_[i] - V_[i - 1]) / grid_.step(); }
  std::vector<double> cell_averages() const;

 private:
  TimeGrid grid_;
  std::vector<double> v_;
  std::vector<double> V_;
  std::vector<double> calV_;
  std::vector<double> V2int_;
};

/// dv = v (mu dt + sigma dB), with d<B, B~> = rho dt against the price driver.
struct GbmVolumeModel {
  double v0 = 1.0;
  double mu = 0.0;
  double sigma = 0.0;
  double rho = 0.0;

  /// Throws std::invalid_argument unless v0 > 0, sigma >= 0, |rho| <= 1.
  void validate() const;
};

/// Simulated GBM turnover. `increments` holds the Brownian increments of B
/// that produced each path, row-major n_paths x N.
struct VolumePathSet {
  TimeGrid grid;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
  std::vector<double> paths;       // n_paths x (N + 1)
  std::vector<double> increments;  // n_paths x N

  std::span<const double> path(std::size_t p) const {
    return {paths.data() + p * grid.size(), grid.size()};
  }
  std::span<const double> driver_increments(std::size_t p) const {
    return {increments.data() + p * grid.steps(), grid.steps()};
  }
};

/// v_t = 1 / (pi sqrt(t (1 - t))) on [0, 1]. The endpoint singularities are
/// clamped to the value a half step inside; V, calV and V2int are exact.
VolumeProfile arcsine_profile(const TimeGrid& grid);

VolumeProfile constant_profile(const TimeGrid& grid, double v);

/// Profile from per-node samples (e.g. an intraday curve); integrals by the
/// running trapezoid rule.
VolumeProfile profile_from_samples(const TimeGrid& grid, std::span<const double> samples);

/// Harmonic-mean turnover u_t = 1 / E[1/v_t] = v0 exp((mu - sigma^2) t) of the
/// GBM model, with closed-form U_t, calU_t and int U^2.
VolumeProfile gbm_harmonic_mean(const GbmVolumeModel& model, const TimeGrid& grid);

/// Exact lognormal stepping v_{k+1} = v_k exp((mu - sigma^2/2) tau + sigma dB).
/// Path p draws from its own stream derived from (seed, p).
VolumePathSet simulate_gbm_paths(const GbmVolumeModel& model, const TimeGrid& grid, std::size_t n_paths,
                                 std::uint64_t seed);

}  // namespace vwapexec
