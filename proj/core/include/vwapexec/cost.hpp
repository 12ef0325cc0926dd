#pragma once

#include <span>
#include <vector>

#include "vwapexec/market.hpp"
#include "vwapexec/strategy.hpp"
#include "vwapexec/volume.hpp"

namespace vwapexec {

/// Realized implementation shortfall split as
///   kappa Phi^2 / 2  -  int phi dS0  +  kappa_tilde int zeta^2 / v dt.
struct CostBreakdown {
  double total = 0.0;
  double permanent = 0.0;
  double temporary = 0.0;
  double price_risk = 0.0;
};

/// Mean-variance value E[C] + lambda Var[C].
struct MvValue {
  double expectation = 0.0;
  double variance = 0.0;
  double objective = 0.0;
  double lambda = 0.0;
};

MvValue make_mv_value(double expectation, double variance, double lambda);

/// Realized cost S0_0 Phi - int S_t zeta_t dt on one (price, volume) path with
/// S_t = S0_t - kappa (Phi - phi_t) - kappa_tilde zeta_t / v_t.
///
/// Price and rate are linear between nodes, so the price and permanent-impact
/// integrals are evaluated exactly (Simpson on each interval); the temporary
/// term uses the trapezoid rule on zeta^2 / v. The direct value is checked
/// against the decomposition and returned in `total`.
CostBreakdown realized_is_cost(std::span<const double> price_path, std::span<const double> volume_path,
                               const Strategy& s, const MarketParams& market);

/// Same as realized_is_cost but returns the direct evaluation without the
/// decomposition cross-check. Exposed for the bookkeeping tests.
double realized_is_cost_direct(std::span<const double> price_path, std::span<const double> volume_path,
                               const Strategy& s, const InventoryCurve& inventory, const MarketParams& market);

/// Volume-weighted mean of the price over the horizon (trapezoid).
double market_vwap(std::span<const double> price_path, std::span<const double> volume_path, double step);
double trader_vwap(std::span<const double> price_path, const Strategy& s);
/// trader_vwap - market_vwap.
double vwap_slippage(std::span<const double> price_path, std::span<const double> volume_path, const Strategy& s);

/// kappa Phi^2 / 2 + kappa_tilde int zeta^2 / v dt.
double expected_cost(const Strategy& s, const VolumeProfile& profile, const MarketParams& market);
/// GBM turnover: E[1/v_t] = 1/u_t.
double expected_cost(const Strategy& s, const GbmVolumeModel& model, const MarketParams& market);

/// Deterministic turnover: the only risk is sigma_tilde^2 int phi^2 dt.
MvValue mv_deterministic(const Strategy& s, const VolumeProfile& profile, double lambda, const MarketParams& market);

/// Pieces of Var[C] under GBM turnover.
struct GbmVarianceTerms {
  double price = 0.0;          // sigma_tilde^2 int phi^2
  double cross_moment = 0.0;   // E[M_T A_T]
  double impact = 0.0;         // int int zeta_s^2 zeta_t^2 C_{s,t}
  double variance(const MarketParams& m) const {
    return price - 2.0 * m.sigma_tilde * m.kappa_tilde * cross_moment + m.kappa_tilde * m.kappa_tilde * impact;
  }
};

/// C_{s,t} = E[p_s p_t] = v0^-2 exp(-(mu - sigma^2)(s + t)) (exp(sigma^2 min(s,t)) - 1).
double impact_covariance(const GbmVolumeModel& model, double s, double t);

/// E[M_T A_T] = -(sigma rho / v0) int zeta_t^2 exp(-(mu - sigma^2) t) int_0^t phi ds dt.
double cross_moment_reduced(const Strategy& s, const InventoryCurve& inventory, const GbmVolumeModel& model);

/// The same moment from the two-dimensional Gaussian integral representation
/// with rho_t = b_t / sqrt(a_t t), evaluated by tensor Gauss-Hermite
/// quadrature with `nodes` points per dimension.
double cross_moment_gauss_hermite(const Strategy& s, const InventoryCurve& inventory, const GbmVolumeModel& model,
                                  std::size_t nodes = 32);

/// int int zeta_s^2 zeta_t^2 C_{s,t} by the 2-D trapezoid rule, O(N) using the
/// factorization C_{s,t} = g(min) h(max).
double impact_double_integral(const Strategy& s, const GbmVolumeModel& model);
/// Same sum over the full N x N grid; reference for the factorized form.
double impact_double_integral_full(const Strategy& s, const GbmVolumeModel& model);

GbmVarianceTerms gbm_variance_terms(const Strategy& s, const GbmVolumeModel& model, const MarketParams& market);

/// MV^lambda under GBM turnover, cross moment from the reduced closed form.
MvValue mv_gbm(const Strategy& s, const GbmVolumeModel& model, double lambda, const MarketParams& market);

/// MV^lambda under GBM turnover, cross moment by Gauss-Hermite quadrature.
MvValue mv_gbm_quadrature_check(const Strategy& s, const GbmVolumeModel& model, double lambda,
                                const MarketParams& market);

/// int_0^t phi for the inventory implied by node rates that are linear
/// between nodes (phi is then quadratic on each interval).
std::vector<double> cumulative_inventory_integral(const Strategy& s, const InventoryCurve& inventory);

}  // namespace vwapexec
