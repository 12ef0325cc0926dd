#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "vwapexec/bvp.hpp"
#include "vwapexec/quadrature.hpp"
#include "vwapexec/strategy.hpp"

namespace vwapexec {

namespace {

std::vector<double> clip_and_normalize(std::vector<double> rates, double target) {
  for (double& r : rates) r = std::max(r, 0.0);
  const double total = std::accumulate(rates.begin(), rates.end(), 0.0);
  for (double& r : rates) r *= target / total;
  return rates;
}

}  // namespace

AsymptoticExpansion asymptotic_expansion(const VolumeProfile& profile, const MarketParams& market, double lambda,
                                         double Phi) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("asymptotic_expansion: lambda must be nonnegative");
  market.validate();
  const TimeGrid& grid = profile.grid();
  const std::size_t N = grid.steps();
  const double tau = grid.step();
  const double VT = profile.total();
  const double theta = market.risk_weight();

  AsymptoticExpansion out{vwap_strategy(profile, Phi), {}, {}, {}, {}, {}, {}, lambda};

  // Correction: phi~'' - a phi~' = theta v phi0, phi~ = 0 at both ends.
  const auto co = euler_lagrange_coefficients(profile);
  LinearBvpSpec spec{grid, co.a, std::vector<double>(grid.size(), 0.0), std::vector<double>(grid.size(), 0.0), 0.0,
                     0.0};
  for (std::size_t i = 0; i <= N; ++i) {
    const double phi0 = Phi * (1.0 - profile.V()[i] / VT);
    spec.rhs[i] = theta * co.volume_weight[i] * phi0;
  }
  out.first_order_inventory = solve_linear_bvp(spec).values;

  const auto& p = out.first_order_inventory;
  out.first_order_rate.resize(grid.size());
  out.first_order_rate[0] = (3.0 * p[0] - 4.0 * p[1] + p[2]) / (2.0 * tau);
  for (std::size_t i = 1; i < N; ++i) out.first_order_rate[i] = (p[i - 1] - p[i + 1]) / (2.0 * tau);
  out.first_order_rate[N] = (4.0 * p[N - 1] - p[N - 2] - 3.0 * p[N]) / (2.0 * tau);

  out.zeroth_interval_rates.resize(N);
  out.first_order_interval_rates.resize(N);
  for (std::size_t i = 1; i <= N; ++i) {
    out.zeroth_interval_rates[i - 1] = profile.cell_average(i) * Phi / VT;
    out.first_order_interval_rates[i - 1] = (p[i - 1] - p[i]) / tau;
  }

  if (lambda == 0.0) {
    out.composite = out.zeroth;
    out.composite_interval_rates = out.zeroth_interval_rates;
    return out;
  }

  std::vector<double> combined(N);
  for (std::size_t i = 0; i < N; ++i)
    combined[i] = out.zeroth_interval_rates[i] + lambda * out.first_order_interval_rates[i];
  out.composite_interval_rates = clip_and_normalize(std::move(combined), Phi / tau);

  std::vector<double> nodal(grid.size());
  for (std::size_t i = 0; i <= N; ++i) nodal[i] = std::max(out.zeroth.zeta[i] + lambda * out.first_order_rate[i], 0.0);
  const double executed = trapezoid(nodal, tau);
  for (double& z : nodal) z *= Phi / executed;
  out.composite = Strategy{grid, std::move(nodal), Phi, std::nullopt};
  return out;
}

std::vector<double> first_order_inventory_closed_form(const VolumeProfile& profile, const MarketParams& market,
                                                      double Phi) {
  market.validate();
  const TimeGrid& grid = profile.grid();
  const std::size_t N = grid.steps();
  const double theta = market.risk_weight();
  const double VT = profile.total();
  const double calVT = profile.calV()[N];
  const double V2T = profile.V2int()[N];
  const double A = 2.0 * calVT / VT - grid.horizon() - V2T / (VT * VT);
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i <= N; ++i) {
    const double t = grid.node(i), V = profile.V()[i];
    out[i] = theta * Phi *
             (t * V - (1.0 + V / VT) * profile.calV()[i] + profile.V2int()[i] / VT + A * V);
  }
  return out;
}

}  // namespace vwapexec
