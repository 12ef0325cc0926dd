#pragma once

#include <span>
#include <vector>

#include "vwapexec/grid.hpp"
#include "vwapexec/market.hpp"
#include "vwapexec/strategy.hpp"
#include "vwapexec/volume.hpp"

namespace vwapexec {

/// phi'' - a_t phi' - c_t phi = rhs_t on the grid, phi_0 = left, phi_N = right.
struct LinearBvpSpec {
  TimeGrid grid;
  std::vector<double> a;
  std::vector<double> c;
  std::vector<double> rhs;
  double left_value = 0.0;
  double right_value = 0.0;
};

struct BvpSolution {
  TimeGrid grid;
  std::vector<double> values;
  /// Max discrete-operator residual relative to the size of its terms.
  double residual = 0.0;
};

/// Thomas elimination for a tridiagonal system. `lower[0]` and
/// `upper[n-1]` are ignored. Throws SolverFailure naming the row whose pivot
/// vanished.
std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs);

/// Second-order central differences, tridiagonal solve. Requires N >= 3.
BvpSolution solve_linear_bvp(const LinearBvpSpec& spec);

/// Coefficients of the Euler-Lagrange operator phi'' - a phi' - k v phi for a
/// volume profile, taken from cell-averaged turnover so that singular
/// profiles (arcsine) are handled through their exact cumulative volume:
///   a_i = 2 (vbar_{i+1} - vbar_i) / (tau (vbar_{i+1} + vbar_i))
///   w_i = harmonic mean of vbar_i and vbar_{i+1}   (the v_t weight)
struct EulerLagrangeCoefficients {
  std::vector<double> a;
  std::vector<double> volume_weight;
};

EulerLagrangeCoefficients euler_lagrange_coefficients(const VolumeProfile& profile);

struct OdeInventory {
  InventoryCurve inventory;
  double residual = 0.0;
  /// True if -d phi / dt >= 0 on every interval.
  bool rates_nonnegative = true;
  double min_interval_rate = 0.0;
};

/// Mean-variance optimal inventory for deterministic turnover:
///   phi'' - a_t phi' - (sigma_tilde^2 lambda / kappa_tilde) v_t phi = 0,
///   phi_0 = Phi, phi_T = 0.
OdeInventory optimal_inventory_ode(const VolumeProfile& profile, double lambda, const MarketParams& market,
                                   double Phi);

}  // namespace vwapexec
