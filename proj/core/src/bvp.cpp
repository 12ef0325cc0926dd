#include "vwapexec/bvp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "vwapexec/errors.hpp"

namespace vwapexec {

std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || rhs.size() != n)
    throw std::invalid_argument("solve_tridiagonal: band sizes differ");
  if (n == 0) return {};
  std::vector<double> c(n), d(n), x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double sub = i > 0 ? lower[i] : 0.0;
    const double pivot = diag[i] - (i > 0 ? sub * c[i - 1] : 0.0);
    const double scale = std::abs(diag[i]) + std::abs(sub) + (i + 1 < n ? std::abs(upper[i]) : 0.0);
    if (!std::isfinite(pivot) || std::abs(pivot) <= 64.0 * std::numeric_limits<double>::epsilon() * scale)
      throw SolverFailure("singular tridiagonal system", i);
    c[i] = i + 1 < n ? upper[i] / pivot : 0.0;
    d[i] = (rhs[i] - (i > 0 ? sub * d[i - 1] : 0.0)) / pivot;
  }
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

BvpSolution solve_linear_bvp(const LinearBvpSpec& spec) {
  const std::size_t N = spec.grid.steps();
  if (N < 3) throw std::invalid_argument("solve_linear_bvp: need N >= 3");
  const std::size_t n = spec.grid.size();
  if (spec.a.size() != n || spec.c.size() != n || spec.rhs.size() != n)
    throw std::invalid_argument("solve_linear_bvp: coefficient arrays need N + 1 entries");
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(spec.a[i]) || !std::isfinite(spec.c[i]) || !std::isfinite(spec.rhs[i]))
      throw std::invalid_argument("solve_linear_bvp: coefficients must be finite");

  const double tau = spec.grid.step();
  const double inv_tau2 = 1.0 / (tau * tau);
  const double inv_2tau = 0.5 / tau;
  auto lower_of = [&](std::size_t i) { return inv_tau2 + spec.a[i] * inv_2tau; };
  auto diag_of = [&](std::size_t i) { return -2.0 * inv_tau2 - spec.c[i]; };
  auto upper_of = [&](std::size_t i) { return inv_tau2 - spec.a[i] * inv_2tau; };

  const std::size_t m = N - 1;
  std::vector<double> lower(m), diag(m), upper(m), rhs(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = k + 1;
    lower[k] = lower_of(i);
    diag[k] = diag_of(i);
    upper[k] = upper_of(i);
    rhs[k] = spec.rhs[i];
  }
  rhs.front() -= lower.front() * spec.left_value;
  rhs.back() -= upper.back() * spec.right_value;

  std::vector<double> interior;
  try {
    interior = solve_tridiagonal(lower, diag, upper, rhs);
  } catch (const SolverFailure& e) {
    // Report the grid node rather than the interior row.
    throw SolverFailure("boundary-value system is singular", e.pivot() + 1);
  }

  BvpSolution sol{spec.grid, std::vector<double>(n), 0.0};
  sol.values.front() = spec.left_value;
  sol.values.back() = spec.right_value;
  std::copy(interior.begin(), interior.end(), sol.values.begin() + 1);

  const auto& p = sol.values;
  double worst = 0.0, scale = std::numeric_limits<double>::min();
  for (std::size_t i = 1; i < N; ++i) {
    const double lo = lower_of(i) * p[i - 1], di = diag_of(i) * p[i], up = upper_of(i) * p[i + 1];
    worst = std::max(worst, std::abs(lo + di + up - spec.rhs[i]));
    scale = std::max(scale, std::abs(lo) + std::abs(di) + std::abs(up) + std::abs(spec.rhs[i]));
  }
  sol.residual = worst / scale;
  return sol;
}

EulerLagrangeCoefficients euler_lagrange_coefficients(const VolumeProfile& profile) {
  const std::size_t N = profile.grid().steps();
  const double tau = profile.grid().step();
  const std::vector<double> vbar = profile.cell_averages();
  EulerLagrangeCoefficients co{std::vector<double>(N + 1), std::vector<double>(N + 1)};
  for (std::size_t i = 1; i < N; ++i) {
    const double left = vbar[i - 1], right = vbar[i];
    co.a[i] = 2.0 * (right - left) / (tau * (right + left));
    co.volume_weight[i] = 2.0 * left * right / (left + right);
  }
  co.a[0] = co.a[1];
  co.a[N] = co.a[N - 1];
  co.volume_weight[0] = vbar.front();
  co.volume_weight[N] = vbar.back();
  return co;
}

OdeInventory optimal_inventory_ode(const VolumeProfile& profile, double lambda, const MarketParams& market,
                                   double Phi) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("optimal_inventory_ode: lambda must be nonnegative");
  if (!(Phi > 0.0)) throw std::invalid_argument("optimal_inventory_ode: Phi must be positive");
  market.validate();
  const auto co = euler_lagrange_coefficients(profile);
  const double k = market.risk_weight() * lambda;

  LinearBvpSpec spec{profile.grid(), co.a, co.volume_weight, std::vector<double>(profile.grid().size(), 0.0), Phi,
                     0.0};
  for (double& c : spec.c) c *= k;
  BvpSolution sol = solve_linear_bvp(spec);

  OdeInventory out{InventoryCurve{profile.grid(), std::move(sol.values), Phi}, sol.residual, true, 0.0};
  const auto rates = interval_rates(out.inventory);
  out.min_interval_rate = *std::min_element(rates.begin(), rates.end());
  out.rates_nonnegative = out.min_interval_rate >= 0.0;
  return out;
}

}  // namespace vwapexec
