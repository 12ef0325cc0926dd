#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "vwapexec/bvp.hpp"
#include "vwapexec/errors.hpp"
#include "vwapexec/optimizer.hpp"

using namespace vwapexec;

namespace {

constexpr double kPi = std::numbers::pi;
const MarketParams kFig1Market{0.1, 0.02, 0.1, 100.0};

double sup_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

LinearBvpSpec constant_spec(std::size_t n, double c) {
  const auto g = build_grid(1.0, n);
  return LinearBvpSpec{g, std::vector<double>(g.size(), 0.0), std::vector<double>(g.size(), c),
                       std::vector<double>(g.size(), 0.0), 1.0, 0.0};
}

double sinh_error(std::size_t n, double gamma) {
  const auto sol = solve_linear_bvp(constant_spec(n, gamma * gamma));
  double err = 0.0;
  for (std::size_t i = 0; i < sol.values.size(); ++i) {
    const double t = sol.grid.node(i);
    err = std::max(err, std::abs(sol.values[i] - std::sinh(gamma * (1.0 - t)) / std::sinh(gamma)));
  }
  return err;
}

// phi = sin(pi t) + 1 - t with a = 1 + t, c = 2 + sin(3 t).
double manufactured_error(std::size_t n) {
  const auto g = build_grid(1.0, n);
  LinearBvpSpec spec{g, {}, {}, {}, 1.0, 0.0};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t = g.node(i);
    const double phi = std::sin(kPi * t) + 1.0 - t;
    const double d1 = kPi * std::cos(kPi * t) - 1.0;
    const double d2 = -kPi * kPi * std::sin(kPi * t);
    const double a = 1.0 + t, c = 2.0 + std::sin(3.0 * t);
    spec.a.push_back(a);
    spec.c.push_back(c);
    spec.rhs.push_back(d2 - a * d1 - c * phi);
  }
  const auto sol = solve_linear_bvp(spec);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t = g.node(i);
    err = std::max(err, std::abs(sol.values[i] - (std::sin(kPi * t) + 1.0 - t)));
  }
  return err;
}

VolumeProfile wavy_profile(std::size_t n) {
  const auto g = build_grid(1.0, n);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = 1.0 + 0.6 * std::cos(2.0 * kPi * g.node(i));
  return profile_from_samples(g, v);
}

}  // namespace

TEST(Tridiagonal, SolvesSmallSystem) {
  const std::vector<double> lower{0, 1, 1}, diag{4, 4, 4}, upper{1, 1, 0}, rhs{5, 6, 5};
  const auto x = solve_tridiagonal(lower, diag, upper, rhs);
  for (double xi : x) EXPECT_NEAR(xi, 1.0, 1e-15);
}

TEST(Tridiagonal, ZeroPivotIsReported) {
  const std::vector<double> lower{0, 1, 1}, diag{1, 1, 4}, upper{1, 1, 0}, rhs{1, 1, 1};
  try {
    solve_tridiagonal(lower, diag, upper, rhs);
    FAIL() << "expected SolverFailure";
  } catch (const SolverFailure& e) {
    EXPECT_EQ(e.pivot(), 1u);
  }
}

TEST(LinearBvp, HarmonicProblemIsStraightLine) {
  const auto sol = solve_linear_bvp(constant_spec(10, 0.0));
  for (std::size_t i = 0; i < sol.values.size(); ++i) EXPECT_NEAR(sol.values[i], 1.0 - sol.grid.node(i), 1e-14);
  EXPECT_LT(sol.residual, 1e-12);
}

TEST(LinearBvp, RejectsCoarseGridsAndBadSizes) {
  EXPECT_THROW(solve_linear_bvp(constant_spec(2, 1.0)), std::invalid_argument);
  auto spec = constant_spec(10, 1.0);
  spec.c.pop_back();
  EXPECT_THROW(solve_linear_bvp(spec), std::invalid_argument);
}

TEST(LinearBvp, SinhSolution) {
  EXPECT_LT(sinh_error(1000, std::sqrt(10.0)), 1e-4);
  EXPECT_LT(sinh_error(1000, 1.0), 1e-6);
}

TEST(LinearBvp, SecondOrderConvergence) {
  for (double gamma : {1.0, 3.0}) {
    const double e1 = sinh_error(100, gamma), e2 = sinh_error(200, gamma), e3 = sinh_error(400, gamma);
    EXPECT_GE(e1 / e2, 3.8);
    EXPECT_GE(e2 / e3, 3.8);
  }
  const double m1 = manufactured_error(80), m2 = manufactured_error(160), m3 = manufactured_error(320);
  EXPECT_GE(std::log2(m1 / m2), 1.95);
  EXPECT_GE(std::log2(m2 / m3), 1.95);
}

TEST(LinearBvp, MaximumPrinciple) {
  const auto g = build_grid(1.0, 200);
  LinearBvpSpec spec{g, {}, {}, std::vector<double>(g.size(), 0.0), 0.7, 0.2};
  for (std::size_t i = 0; i < g.size(); ++i) {
    spec.a.push_back(5.0 * std::sin(7.0 * g.node(i)));
    spec.c.push_back(30.0 * g.node(i));
  }
  for (double x : solve_linear_bvp(spec).values) {
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 0.7);
  }
}

TEST(EulerLagrange, CoefficientsOnConstantVolume) {
  const auto co = euler_lagrange_coefficients(constant_profile(build_grid(1.0, 20), 2.5));
  for (double a : co.a) EXPECT_NEAR(a, 0.0, 1e-13);
  for (double w : co.volume_weight) EXPECT_NEAR(w, 2.5, 1e-13);
}

TEST(OptimalInventory, ConstantVolumeMatchesSinhClosedForm) {
  const auto g = build_grid(1.0, 1000);
  for (double lambda : {0.5, 2.0, 20.0}) {
    const auto ode = optimal_inventory_ode(constant_profile(g, 1.3), lambda, kFig1Market, 1.0);
    const auto closed = ac_closed_form_inventory(lambda, kFig1Market, 1.3, g, 1.0);
    EXPECT_LT(sup_diff(ode.inventory.phi, closed.phi), 1e-4) << lambda;
    EXPECT_TRUE(ode.rates_nonnegative);
  }
}

TEST(OptimalInventory, VanishingRiskAversionApproachesVwap) {
  for (const auto& p : {arcsine_profile(build_grid(1.0, 1000)), wavy_profile(1000)}) {
    const auto ode = optimal_inventory_ode(p, 1e-8, kFig1Market, 1.0);
    for (std::size_t i = 0; i < p.grid().size(); ++i)
      EXPECT_NEAR(ode.inventory.phi[i], 1.0 - p.V()[i] / p.total(), 1e-5);
  }
}

TEST(OptimalInventory, AgreesWithQuadraticProgram) {
  for (const auto& p : {arcsine_profile(build_grid(1.0, 1000)), wavy_profile(1000),
                        constant_profile(build_grid(1.0, 1000), 0.8)}) {
    for (double lambda : {0.5, 1.0, 2.0}) {
      const auto ode = optimal_inventory_ode(p, lambda, kFig1Market, 1.0);
      ASSERT_TRUE(ode.rates_nonnegative);
      const auto qp = solve_qp_deterministic(p, lambda, kFig1Market, 1.0);
      EXPECT_LE(sup_diff(ode.inventory.phi, qp.inventory.phi), 1e-4) << "lambda " << lambda;
    }
  }
}

TEST(OptimalInventory, StaysMonotoneOnSteppedVolume) {
  // With c > 0 the solution has no interior maximum, so it never buys back.
  const auto g = build_grid(1.0, 400);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = g.node(i) < 0.5 ? 5.0 : 0.05;
  const auto ode = optimal_inventory_ode(profile_from_samples(g, v), 1e4, kFig1Market, 1.0);
  EXPECT_TRUE(ode.rates_nonnegative);
  EXPECT_GE(ode.min_interval_rate, 0.0);
}
