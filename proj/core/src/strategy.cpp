#include "vwapexec/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vwapexec/errors.hpp"
#include "vwapexec/quadrature.hpp"

namespace vwapexec {

namespace {

void require_positive_shares(double Phi, const char* who) {
  if (!(Phi > 0.0) || !std::isfinite(Phi)) throw std::invalid_argument(std::string(who) + ": Phi must be positive");
}

Strategy normalized(const TimeGrid& grid, std::vector<double> weights, double Phi) {
  const double total = trapezoid(weights, grid.step());
  if (!(total > 0.0)) throw std::invalid_argument("strategy weights must have positive integral");
  const double gamma = Phi / total;
  for (double& w : weights) w *= gamma;
  Strategy s{grid, std::move(weights), Phi, gamma};
  return s;
}

}  // namespace

double Strategy::executed() const { return trapezoid(zeta, grid.step()); }

double Strategy::sell_off_error() const { return std::abs(executed() - Phi) / Phi; }

InventoryCurve inventory_from_rate(const Strategy& s) {
  require_positive_shares(s.Phi, "inventory_from_rate");
  if (s.zeta.size() != s.grid.size()) throw std::invalid_argument("inventory_from_rate: rate/grid size mismatch");
  if (s.sell_off_error() > kSellOffTolerance)
    throw InconsistentStrategy("strategy executes " + std::to_string(s.executed()) + " of " + std::to_string(s.Phi) +
                               " shares");
  InventoryCurve c{s.grid, cumulative_trapezoid(s.zeta, s.grid.step()), s.Phi};
  for (double& x : c.phi) x = s.Phi - x;
  c.phi.back() = 0.0;
  return c;
}

Strategy rate_from_inventory(const InventoryCurve& c) {
  const std::size_t n = c.grid.size();
  if (c.phi.size() != n) throw std::invalid_argument("rate_from_inventory: inventory/grid size mismatch");
  if (n < 3) throw std::invalid_argument("rate_from_inventory: need at least 3 nodes");
  require_positive_shares(c.Phi, "rate_from_inventory");
  for (std::size_t i = 1; i < n; ++i)
    if (c.phi[i] - c.phi[i - 1] > 1e-10 * c.Phi)
      throw NegativeRate("inventory increases between t=" + std::to_string(c.grid.node(i - 1)) +
                         " and t=" + std::to_string(c.grid.node(i)));

  const double h2 = 2.0 * c.grid.step();
  const auto& p = c.phi;
  std::vector<double> zeta(n);
  zeta[0] = (3.0 * p[0] - 4.0 * p[1] + p[2]) / h2;
  for (std::size_t i = 1; i + 1 < n; ++i) zeta[i] = (p[i - 1] - p[i + 1]) / h2;
  zeta[n - 1] = (4.0 * p[n - 2] - p[n - 3] - 3.0 * p[n - 1]) / h2;
  // One-sided differences can dip below zero where the curve bends sharply.
  for (double& z : zeta) z = std::max(z, 0.0);
  Strategy s = normalized(c.grid, std::move(zeta), c.Phi);
  s.involvement_ratio.reset();
  return s;
}

std::vector<double> interval_rates(const InventoryCurve& c) {
  std::vector<double> r(c.grid.steps());
  const double tau = c.grid.step();
  for (std::size_t i = 1; i <= r.size(); ++i) r[i - 1] = (c.phi[i - 1] - c.phi[i]) / tau;
  return r;
}

InventoryCurve inventory_from_interval_rates(const TimeGrid& grid, std::span<const double> rates, double Phi) {
  require_positive_shares(Phi, "inventory_from_interval_rates");
  if (rates.size() != grid.steps()) throw std::invalid_argument("interval rates must have N entries");
  InventoryCurve c{grid, std::vector<double>(grid.size()), Phi};
  c.phi[0] = Phi;
  const double tau = grid.step();
  for (std::size_t i = 1; i < grid.size(); ++i) c.phi[i] = c.phi[i - 1] - tau * rates[i - 1];
  if (std::abs(c.phi.back()) > kSellOffTolerance * Phi)
    throw InconsistentStrategy("interval rates leave " + std::to_string(c.phi.back()) + " shares unsold");
  c.phi.back() = 0.0;
  return c;
}

Strategy strategy_from_interval_rates(const TimeGrid& grid, std::span<const double> rates, double Phi) {
  const std::size_t N = grid.steps();
  if (rates.size() != N) throw std::invalid_argument("interval rates must have N entries");
  std::vector<double> zeta(grid.size());
  zeta[0] = rates[0];
  zeta[N] = rates[N - 1];
  for (std::size_t k = 1; k < N; ++k) zeta[k] = 0.5 * (rates[k - 1] + rates[k]);
  return Strategy{grid, std::move(zeta), Phi, std::nullopt};
}

Strategy twap_strategy(const TimeGrid& grid, double Phi) {
  require_positive_shares(Phi, "twap_strategy");
  return Strategy{grid, std::vector<double>(grid.size(), Phi / grid.horizon()), Phi, std::nullopt};
}

Strategy vwap_strategy(const VolumeProfile& profile, double Phi) {
  require_positive_shares(Phi, "vwap_strategy");
  const auto v = profile.v();
  return normalized(profile.grid(), std::vector<double>(v.begin(), v.end()), Phi);
}

Strategy expected_vwap_strategy(const GbmVolumeModel& model, const TimeGrid& grid, double Phi) {
  require_positive_shares(Phi, "expected_vwap_strategy");
  return vwap_strategy(gbm_harmonic_mean(model, grid), Phi);
}

Strategy twisted_vwap(const VolumeProfile& profile, const std::function<double(double)>& k, double alpha, double Phi) {
  require_positive_shares(Phi, "twisted_vwap");
  if (!(alpha > 0.0)) throw std::invalid_argument("twisted_vwap: alpha must be positive");
  std::vector<double> w(profile.grid().size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double kv = k(profile.v()[i]);
    if (!(kv > 0.0) || !std::isfinite(kv))
      throw std::invalid_argument("twisted_vwap: impact function must be positive at every node");
    w[i] = std::pow(kv, -1.0 / alpha);
  }
  return normalized(profile.grid(), std::move(w), Phi);
}

double ac_decay_rate(double lambda, const MarketParams& market, double v) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("risk aversion must be nonnegative");
  if (!(v > 0.0)) throw std::invalid_argument("turnover must be positive");
  market.validate();
  return std::sqrt(market.risk_weight() * lambda * v);
}

namespace {

// sinh(g (T - t)) / sinh(g T) and cosh(g (T - t)) / sinh(g T) without overflow.
double sinh_ratio(double g, double T, double t) {
  return (std::exp(-g * t) - std::exp(-g * (2.0 * T - t))) / -std::expm1(-2.0 * g * T);
}
double cosh_ratio(double g, double T, double t) {
  return (std::exp(-g * t) + std::exp(-g * (2.0 * T - t))) / -std::expm1(-2.0 * g * T);
}

}  // namespace

Strategy ac_closed_form(double lambda, const MarketParams& market, double v, const TimeGrid& grid, double Phi) {
  require_positive_shares(Phi, "ac_closed_form");
  const double g = ac_decay_rate(lambda, market, v);
  if (g == 0.0) return twap_strategy(grid, Phi);
  std::vector<double> zeta(grid.size());
  for (std::size_t i = 0; i < zeta.size(); ++i) zeta[i] = g * Phi * cosh_ratio(g, grid.horizon(), grid.node(i));
  Strategy s = normalized(grid, std::move(zeta), Phi);
  s.involvement_ratio.reset();
  return s;
}

InventoryCurve ac_closed_form_inventory(double lambda, const MarketParams& market, double v, const TimeGrid& grid,
                                        double Phi) {
  require_positive_shares(Phi, "ac_closed_form_inventory");
  const double g = ac_decay_rate(lambda, market, v);
  const double T = grid.horizon();
  InventoryCurve c{grid, std::vector<double>(grid.size()), Phi};
  for (std::size_t i = 0; i < c.phi.size(); ++i) {
    const double t = grid.node(i);
    c.phi[i] = g == 0.0 ? Phi * (T - t) / T : Phi * sinh_ratio(g, T, t);
  }
  c.phi.front() = Phi;
  c.phi.back() = 0.0;
  return c;
}

}  // namespace vwapexec
