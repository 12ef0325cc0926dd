#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vwapexec/cost.hpp"
#include "vwapexec/grid.hpp"
#include "vwapexec/market.hpp"
#include "vwapexec/strategy.hpp"
#include "vwapexec/volume.hpp"

namespace vwapexec {

enum class SolveStatus { converged, max_iterations, infeasible };

std::string to_string(SolveStatus status);

struct SolveReport {
  double objective = 0.0;
  std::size_t iterations = 0;
  double kkt_residual = 0.0;
  std::vector<std::size_t> active_bounds;  // interval indices (0-based) with rate 0
  SolveStatus status = SolveStatus::converged;
};

/// Optimizer output: the piecewise-constant rates (one per interval), the
/// node-resampled Strategy, the exact nodal inventory, and the objective
/// split into E[C] and Var[C].
struct OptimalStrategy {
  std::vector<double> interval_rates;
  Strategy strategy;
  InventoryCurve inventory;
  MvValue value;
  SolveReport report;
};

/// int phi^2 dt for piecewise-linear inventory phi_k = Phi - tau sum_{m<=k} r_m,
/// exact on each interval, with gradient and Hessian in the rates.
class InventorySquareIntegral {
 public:
  InventorySquareIntegral(std::size_t n, double step, double Phi);

  double value(const Eigen::VectorXd& rates) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& rates) const;
  const Eigen::MatrixXd& hessian() const noexcept { return hessian_; }

 private:
  std::size_t n_;
  double step_;
  double Phi_;
  Eigen::MatrixXd hessian_;
};

/// Discretized f^lambda for deterministic turnover,
///   sum tau r_i^2 / vbar_i + theta lambda int phi^2,   theta = sigma_tilde^2 / kappa_tilde,
/// a convex quadratic in the interval rates.
class DeterministicObjective {
 public:
  DeterministicObjective(const VolumeProfile& profile, double lambda, const MarketParams& market, double Phi);

  double value(const Eigen::VectorXd& rates) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& rates) const;
  const Eigen::MatrixXd& hessian() const noexcept { return hessian_; }
  /// E[C] and Var[C] of the rates under this model.
  MvValue mv(const Eigen::VectorXd& rates) const;

 private:
  std::vector<double> cell_volume_;
  double lambda_;
  MarketParams market_;
  double Phi_;
  double step_;
  InventorySquareIntegral inventory_;
  Eigen::MatrixXd hessian_;
};

/// Discretized MV^lambda for GBM turnover and piecewise-constant rates:
///   kappa Phi^2/2 + kappa_tilde sum tau r_i^2 / ubar_i
///   + lambda [ sigma_tilde^2 int phi^2
///              + 2 sigma_tilde kappa_tilde (sigma rho / v0) int zeta^2 e^{-(mu - sigma^2)t} int_0^t phi
///              + kappa_tilde^2 int int zeta_s^2 zeta_t^2 C_{s,t} ].
/// Cell integrals of the exponential kernels use Gauss-Legendre rules, so the
/// only discretization is the piecewise-constant rate.
class GbmObjective {
 public:
  GbmObjective(const GbmVolumeModel& model, const TimeGrid& grid, double lambda, const MarketParams& market,
               double Phi);

  double value(const Eigen::VectorXd& rates) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& rates) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& rates) const;
  MvValue mv(const Eigen::VectorXd& rates) const;

  /// int zeta^2 e^{-(mu - sigma^2)t} int_0^t phi  and  int int zeta^2 zeta^2 C.
  double cross_integral(const Eigen::VectorXd& rates) const;
  double impact_integral(const Eigen::VectorXd& rates) const;

  const std::vector<double>& cell_harmonic_volume() const noexcept { return cell_u_; }

 private:
  double variance(const Eigen::VectorXd& rates) const;

  GbmVolumeModel model_;
  TimeGrid grid_;
  double lambda_;
  MarketParams market_;
  double Phi_;
  double cross_scale_;  // 2 sigma_tilde kappa_tilde sigma rho / v0
  std::vector<double> cell_u_;
  // Cross term: W_i = int_{I_i} w, Omega_i = int_{I_i} t w, Lself_i = int_{I_i} w (t - t_{i-1})^2 / 2.
  std::vector<double> W_, Omega_, Lself_;
  // Impact term: C_{s,t} = g(s) h(t) for s < t; G_i, H_i cell integrals, D_i the diagonal block.
  std::vector<double> G_, H_, D_;
  InventorySquareIntegral inventory_;
};

struct QpOptions {
  bool nonnegative = true;
};

/// Direct KKT solve of the deterministic-turnover problem with N intervals
/// (the profile's grid), plus active-set iterations when nonnegative.
OptimalStrategy solve_qp_deterministic(const VolumeProfile& profile, double lambda, const MarketParams& market,
                                       double Phi, const QpOptions& options = {});

struct SqpOptions {
  std::size_t max_iterations = 200;
  double kkt_tolerance = 1e-8;
  double relative_decrease_tolerance = 1e-12;
  double initial_damping = 1e-8;
};

/// Damped-Newton SQP on GbmObjective with the sell-off equality and zeta >= 0,
/// started from the expected-VWAP strategy. Each step solves a bounded QP with
/// the exact Hessian plus Levenberg-Marquardt damping adapted by a ratio test.
OptimalStrategy solve_sqp_gbm(const GbmVolumeModel& model, const TimeGrid& grid, double lambda,
                              const MarketParams& market, double Phi, const SqpOptions& options = {});

}  // namespace vwapexec
