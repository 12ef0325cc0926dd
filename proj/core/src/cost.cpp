#include "vwapexec/cost.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vwapexec/errors.hpp"
#include "vwapexec/quadrature.hpp"

namespace vwapexec {

void MarketParams::validate() const {
  auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
  if (!positive(kappa) || !positive(kappa_tilde) || !positive(sigma_tilde) || !positive(s0))
    throw std::invalid_argument("market params: kappa, kappa_tilde, sigma_tilde and s0 must be positive");
}

MvValue make_mv_value(double expectation, double variance, double lambda) {
  return MvValue{expectation, variance, expectation + lambda * variance, lambda};
}

namespace {

void check_path(std::span<const double> path, const TimeGrid& grid, const char* what) {
  if (path.size() != grid.size())
    throw std::invalid_argument(std::string(what) + " path has " + std::to_string(path.size()) +
                                " nodes, grid has " + std::to_string(grid.size()));
}

void check_volume(std::span<const double> volume) {
  for (double v : volume)
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("volume path must be strictly positive");
}

double temporary_integral(std::span<const double> volume, const Strategy& s) {
  std::vector<double> f(s.zeta.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = s.zeta[i] * s.zeta[i] / volume[i];
  return trapezoid(f, s.grid.step());
}

double square_trapezoid(std::span<const double> x, double step) {
  std::vector<double> sq(x.size());
  std::transform(x.begin(), x.end(), sq.begin(), [](double y) { return y * y; });
  return trapezoid(sq, step);
}

}  // namespace

double realized_is_cost_direct(std::span<const double> price, std::span<const double> volume, const Strategy& s,
                               const InventoryCurve& inventory, const MarketParams& market) {
  const double tau = s.grid.step();
  const double Phi = s.Phi;
  // S0_0 Phi - int S0 zeta is accumulated as S0_0 (Phi - int zeta) - int (S0 - S0_0) zeta
  // to avoid cancelling two large numbers.
  const double s_init = price.front();
  double executed = 0.0;
  double price_proceeds = 0.0;   // int (S0 - S0_0) zeta
  double permanent_drag = 0.0;   // int (Phi - phi) zeta
  for (std::size_t k = 1; k < s.grid.size(); ++k) {
    const double sa = price[k - 1] - s_init, sb = price[k] - s_init;
    const double za = s.zeta[k - 1], zb = s.zeta[k];
    executed += 0.5 * tau * (za + zb);
    price_proceeds += tau * (2.0 * sa * za + sa * zb + sb * za + 2.0 * sb * zb) / 6.0;
    const double xa = Phi - inventory.phi[k - 1], xb = Phi - inventory.phi[k];
    const double xm = xa + tau * (3.0 * za + zb) / 8.0;
    permanent_drag += tau / 6.0 * (xa * za + 2.0 * xm * (za + zb) + xb * zb);
  }
  return s_init * (Phi - executed) - price_proceeds + market.kappa * permanent_drag +
         market.kappa_tilde * temporary_integral(volume, s);
}

CostBreakdown realized_is_cost(std::span<const double> price, std::span<const double> volume, const Strategy& s,
                               const MarketParams& market) {
  check_path(price, s.grid, "price");
  check_path(volume, s.grid, "volume");
  check_volume(volume);
  const InventoryCurve inventory = inventory_from_rate(s);
  const double tau = s.grid.step();

  CostBreakdown c;
  c.permanent = 0.5 * market.kappa * s.Phi * s.Phi;
  c.temporary = market.kappa_tilde * temporary_integral(volume, s);
  for (std::size_t k = 1; k < s.grid.size(); ++k) {
    const double held = tau * inventory.phi[k - 1] - tau * tau * (2.0 * s.zeta[k - 1] + s.zeta[k]) / 6.0;
    c.price_risk -= (price[k] - price[k - 1]) / tau * held;
  }
  c.total = realized_is_cost_direct(price, volume, s, inventory, market);

  const double sum = c.permanent + c.temporary + c.price_risk;
  const double scale = std::max({std::abs(c.total), std::abs(c.permanent) + std::abs(c.temporary) +
                                                        std::abs(c.price_risk)});
  if (std::abs(c.total - sum) > 1e-8 * scale)
    throw Error("implementation shortfall: direct cost and decomposition disagree");
  return c;
}

double market_vwap(std::span<const double> price, std::span<const double> volume, double step) {
  if (price.size() != volume.size()) throw std::invalid_argument("market_vwap: path lengths differ");
  std::vector<double> pv(price.size());
  for (std::size_t i = 0; i < pv.size(); ++i) pv[i] = price[i] * volume[i];
  const double denom = trapezoid(volume, step);
  if (!(denom > 0.0)) throw std::invalid_argument("market_vwap: total volume must be positive");
  return trapezoid(pv, step) / denom;
}

double trader_vwap(std::span<const double> price, const Strategy& s) {
  check_path(price, s.grid, "price");
  return market_vwap(price, s.zeta, s.grid.step());
}

double vwap_slippage(std::span<const double> price, std::span<const double> volume, const Strategy& s) {
  check_path(volume, s.grid, "volume");
  return trader_vwap(price, s) - market_vwap(price, volume, s.grid.step());
}

double expected_cost(const Strategy& s, const VolumeProfile& profile, const MarketParams& market) {
  if (!(profile.grid() == s.grid)) throw std::invalid_argument("expected_cost: strategy and profile grids differ");
  return 0.5 * market.kappa * s.Phi * s.Phi + market.kappa_tilde * temporary_integral(profile.v(), s);
}

double expected_cost(const Strategy& s, const GbmVolumeModel& model, const MarketParams& market) {
  return expected_cost(s, gbm_harmonic_mean(model, s.grid), market);
}

MvValue mv_deterministic(const Strategy& s, const VolumeProfile& profile, double lambda, const MarketParams& market) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("mv_deterministic: lambda must be nonnegative");
  const InventoryCurve inv = inventory_from_rate(s);
  const double variance = market.sigma_tilde * market.sigma_tilde * square_trapezoid(inv.phi, s.grid.step());
  return make_mv_value(expected_cost(s, profile, market), variance, lambda);
}

double impact_covariance(const GbmVolumeModel& model, double s, double t) {
  const double c = model.mu - model.sigma * model.sigma;
  return std::exp(-c * (s + t)) * std::expm1(model.sigma * model.sigma * std::min(s, t)) / (model.v0 * model.v0);
}

std::vector<double> cumulative_inventory_integral(const Strategy& s, const InventoryCurve& inventory) {
  const double tau = s.grid.step();
  std::vector<double> B(s.grid.size(), 0.0);
  for (std::size_t k = 1; k < B.size(); ++k)
    B[k] = B[k - 1] + tau * inventory.phi[k - 1] - tau * tau * (2.0 * s.zeta[k - 1] + s.zeta[k]) / 6.0;
  return B;
}

namespace {

// int_0^t phi^2 for the piecewise-quadratic inventory, 3-point Gauss (exact).
std::vector<double> cumulative_inventory_square(const Strategy& s, const InventoryCurve& inventory) {
  static const QuadratureRule rule = gauss_legendre(3);
  const double tau = s.grid.step();
  std::vector<double> a(s.grid.size(), 0.0);
  for (std::size_t k = 1; k < a.size(); ++k) {
    const double p0 = inventory.phi[k - 1], za = s.zeta[k - 1], zb = s.zeta[k];
    a[k] = a[k - 1] + integrate(rule, 0.0, tau, [&](double x) {
             const double phi = p0 - za * x - (zb - za) * x * x / (2.0 * tau);
             return phi * phi;
           });
  }
  return a;
}

void check_model_strategy(const Strategy& s, const GbmVolumeModel& model) {
  model.validate();
  if (s.zeta.size() != s.grid.size()) throw std::invalid_argument("strategy size does not match its grid");
}

}  // namespace

double cross_moment_reduced(const Strategy& s, const InventoryCurve& inventory, const GbmVolumeModel& model) {
  check_model_strategy(s, model);
  if (model.rho == 0.0 || model.sigma == 0.0) return 0.0;
  const double c = model.mu - model.sigma * model.sigma;
  const auto B = cumulative_inventory_integral(s, inventory);
  std::vector<double> f(s.grid.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = s.zeta[k] * s.zeta[k] * std::exp(-c * s.grid.node(k)) * B[k];
  return -model.sigma * model.rho / model.v0 * trapezoid(f, s.grid.step());
}

double cross_moment_gauss_hermite(const Strategy& s, const InventoryCurve& inventory, const GbmVolumeModel& model,
                                  std::size_t nodes) {
  check_model_strategy(s, model);
  const QuadratureRule gh = gauss_hermite_probabilist(nodes);
  const auto B = cumulative_inventory_integral(s, inventory);
  const auto a = cumulative_inventory_square(s, inventory);
  const double drift = model.mu - 0.5 * model.sigma * model.sigma;

  std::vector<double> f(s.grid.size(), 0.0);
  for (std::size_t k = 1; k < f.size(); ++k) {
    const double t = s.grid.node(k);
    if (!(a[k] > 0.0)) {
      if (s.zeta[k] > 0.0) throw DegenerateCovariance("inventory variance vanishes while trading");
      continue;
    }
    const double rho_t = std::clamp(model.rho * B[k] / std::sqrt(a[k] * t), -1.0, 1.0);
    const double orth = std::sqrt(1.0 - rho_t * rho_t);
    const double scale = model.sigma * std::sqrt(t);
    double inner = 0.0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
      const double z = gh.nodes[i];
      double row = 0.0;
      for (std::size_t j = 0; j < gh.nodes.size(); ++j)
        row += gh.weights[j] * std::exp(-scale * (rho_t * z + orth * gh.nodes[j]));
      inner += gh.weights[i] * z * row;
    }
    f[k] = s.zeta[k] * s.zeta[k] * std::exp(-drift * t) * std::sqrt(a[k]) * inner;
  }
  return trapezoid(f, s.grid.step()) / (2.0 * std::numbers::pi * model.v0);
}

double impact_double_integral(const Strategy& s, const GbmVolumeModel& model) {
  check_model_strategy(s, model);
  const double c = model.mu - model.sigma * model.sigma;
  const double s2 = model.sigma * model.sigma;
  const double inv_v02 = 1.0 / (model.v0 * model.v0);
  const auto w = trapezoid_weights(s.grid.size(), s.grid.step());
  double diag = 0.0, off = 0.0, prefix = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double t = s.grid.node(k);
    const double f = w[k] * s.zeta[k] * s.zeta[k];
    const double g = inv_v02 * std::exp(-c * t) * std::expm1(s2 * t);
    const double h = std::exp(-c * t);
    diag += f * f * g * h;
    off += f * h * prefix;
    prefix += f * g;
  }
  return diag + 2.0 * off;
}

double impact_double_integral_full(const Strategy& s, const GbmVolumeModel& model) {
  check_model_strategy(s, model);
  const auto w = trapezoid_weights(s.grid.size(), s.grid.step());
  double acc = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    double row = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k)
      row += w[k] * s.zeta[k] * s.zeta[k] * impact_covariance(model, s.grid.node(j), s.grid.node(k));
    acc += w[j] * s.zeta[j] * s.zeta[j] * row;
  }
  return acc;
}

GbmVarianceTerms gbm_variance_terms(const Strategy& s, const GbmVolumeModel& model, const MarketParams& market) {
  market.validate();
  const InventoryCurve inv = inventory_from_rate(s);
  GbmVarianceTerms terms;
  terms.price = market.sigma_tilde * market.sigma_tilde * square_trapezoid(inv.phi, s.grid.step());
  terms.cross_moment = cross_moment_reduced(s, inv, model);
  terms.impact = impact_double_integral(s, model);
  return terms;
}

MvValue mv_gbm(const Strategy& s, const GbmVolumeModel& model, double lambda, const MarketParams& market) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("mv_gbm: lambda must be nonnegative");
  const auto terms = gbm_variance_terms(s, model, market);
  return make_mv_value(expected_cost(s, model, market), terms.variance(market), lambda);
}

MvValue mv_gbm_quadrature_check(const Strategy& s, const GbmVolumeModel& model, double lambda,
                                const MarketParams& market) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("mv_gbm_quadrature_check: lambda must be nonnegative");
  auto terms = gbm_variance_terms(s, model, market);
  terms.cross_moment = cross_moment_gauss_hermite(s, inventory_from_rate(s), model);
  return make_mv_value(expected_cost(s, model, market), terms.variance(market), lambda);
}

}  // namespace vwapexec
