#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "vwapexec/grid.hpp"
#include "vwapexec/market.hpp"
#include "vwapexec/volume.hpp"

namespace vwapexec {

/// Execution-rate curve zeta_t >= 0 sampled at grid nodes, liquidating Phi
/// shares: the trapezoid integral of zeta equals Phi.
struct Strategy {
  TimeGrid grid;
  std::vector<double> zeta;
  double Phi = 0.0;
  // Proportionality constant for strategies of the form gamma * v_t.
  std::optional<double> involvement_ratio;

  double executed() const;
  /// |executed - Phi| / Phi.
  double sell_off_error() const;
};

/// Remaining shares phi_t = Phi - int_0^t zeta_r dr at grid nodes.
struct InventoryCurve {
  TimeGrid grid;
  std::vector<double> phi;
  double Phi = 0.0;
};

inline constexpr double kSellOffTolerance = 1e-10;

/// Running trapezoid integral of the rates; phi_N is forced to exactly 0.
/// Throws InconsistentStrategy if the rates miss Phi by more than 1e-10 relative.
InventoryCurve inventory_from_rate(const Strategy& s);

/// zeta = -d phi / dt by second-order differences (one-sided at the ends),
/// rescaled so the sell-off condition holds exactly. Throws NegativeRate if
/// phi increases by more than 1e-10 * Phi over a step.
Strategy rate_from_inventory(const InventoryCurve& c);

// Piecewise-constant (per interval) representation used by the optimizer.

/// (phi_{i-1} - phi_i) / tau for i = 1..N.
std::vector<double> interval_rates(const InventoryCurve& c);

/// Inventory at nodes for rates constant on each interval.
InventoryCurve inventory_from_interval_rates(const TimeGrid& grid, std::span<const double> rates, double Phi);

/// Node values from interval rates: ends take the adjacent interval, interior
/// nodes the mean of the two neighbours. Preserves the trapezoid total exactly.
Strategy strategy_from_interval_rates(const TimeGrid& grid, std::span<const double> rates, double Phi);

/// Constant rate Phi / T.
Strategy twap_strategy(const TimeGrid& grid, double Phi);

/// zeta_t = gamma v_t. gamma is Phi over the trapezoid total of v, which is
/// V_T whenever the profile is resolved by the grid (see README for the
/// arcsine endpoints).
Strategy vwap_strategy(const VolumeProfile& profile, double Phi);

/// zeta_t proportional to the GBM harmonic-mean turnover u_t.
Strategy expected_vwap_strategy(const GbmVolumeModel& model, const TimeGrid& grid, double Phi);

/// zeta_t proportional to k(v_t)^(-1/alpha), for temporary impact k(v) zeta^alpha.
Strategy twisted_vwap(const VolumeProfile& profile, const std::function<double(double)>& k, double alpha,
                      double Phi);

/// gamma = sqrt(sigma_tilde^2 lambda v / kappa_tilde) for constant turnover v.
double ac_decay_rate(double lambda, const MarketParams& market, double v);

/// Closed-form mean-variance optimum for constant turnover:
///   phi_t = Phi sinh(gamma (T - t)) / sinh(gamma T).
/// Rates are gamma Phi cosh(gamma (T - t)) / sinh(gamma T), rescaled by the
/// O(tau^2) factor that makes the trapezoid total exactly Phi.
Strategy ac_closed_form(double lambda, const MarketParams& market, double v, const TimeGrid& grid, double Phi);
InventoryCurve ac_closed_form_inventory(double lambda, const MarketParams& market, double v, const TimeGrid& grid,
                                        double Phi);

/// First-order expansion of the mean-variance optimum in lambda around VWAP.
struct AsymptoticExpansion {
  Strategy zeroth;     // VWAP
  Strategy composite;  // zeroth + lambda * first order, clipped at 0 and renormalized
  std::vector<double> first_order_inventory;  // phi~, zero at both ends
  std::vector<double> first_order_rate;       // -d phi~ / dt at nodes, unclipped

  // Interval-level curves, exact in V: v-bar Phi / V_T, the first-order
  // correction, and their clipped combination.
  std::vector<double> zeroth_interval_rates;
  std::vector<double> first_order_interval_rates;
  std::vector<double> composite_interval_rates;
  double lambda = 0.0;
};

AsymptoticExpansion asymptotic_expansion(const VolumeProfile& profile, const MarketParams& market, double lambda,
                                         double Phi);

/// Closed-form first-order inventory correction
///   theta Phi [t V - (1 + V/V_T) calV + V2int / V_T + A V],
///   A = 2 calV_T / V_T - T - V2int_T / V_T^2,  theta = sigma_tilde^2 / kappa_tilde.
/// Used to cross-check the boundary-value route.
std::vector<double> first_order_inventory_closed_form(const VolumeProfile& profile, const MarketParams& market,
                                                      double Phi);

}  // namespace vwapexec
