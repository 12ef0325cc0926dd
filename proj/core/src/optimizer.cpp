#include "vwapexec/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vwapexec/errors.hpp"
#include "vwapexec/qp.hpp"
#include "vwapexec/quadrature.hpp"

namespace vwapexec {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations: return "max-iterations";
    case SolveStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

namespace {

void check_problem(double lambda, const MarketParams& market, double Phi) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be nonnegative");
  if (!(Phi > 0.0) || !std::isfinite(Phi)) throw std::invalid_argument("Phi must be positive");
  market.validate();
}

void check_rates(const Eigen::VectorXd& r, std::size_t n) {
  if (static_cast<std::size_t>(r.size()) != n) throw std::invalid_argument("rate vector must have N entries");
}

Eigen::VectorXd to_eigen(std::span<const double> x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

std::vector<std::size_t> zero_rates(const Eigen::VectorXd& r) {
  std::vector<std::size_t> out;
  for (Eigen::Index i = 0; i < r.size(); ++i)
    if (r[i] <= 0.0) out.push_back(static_cast<std::size_t>(i));
  return out;
}

OptimalStrategy package(const TimeGrid& grid, Eigen::VectorXd r, double Phi, MvValue value, SolveReport report) {
  // Absorb roundoff in the sell-off constraint before building curves.
  const double executed = grid.step() * r.sum();
  if (executed > 0.0) r *= Phi / executed;
  OptimalStrategy out;
  out.interval_rates.assign(r.data(), r.data() + r.size());
  out.strategy = strategy_from_interval_rates(grid, out.interval_rates, Phi);
  out.inventory = inventory_from_interval_rates(grid, out.interval_rates, Phi);
  out.value = value;
  out.report = std::move(report);
  return out;
}

}  // namespace

InventorySquareIntegral::InventorySquareIntegral(std::size_t n, double step, double Phi)
    : n_(n), step_(step), Phi_(Phi), hessian_(Eigen::MatrixXd::Zero(n, n)) {
  if (n == 0 || !(step > 0.0)) throw std::invalid_argument("InventorySquareIntegral: empty grid");
  // Mass matrix of piecewise-linear phi on nodes 0..n, summed over the
  // suffixes that each rate feeds: H_ml = 2 tau^2 sum_{k>m} sum_{j>l} M_kj.
  const Eigen::Index m = static_cast<Eigen::Index>(n) + 1;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m + 1, m + 1);
  auto mass = [&](Eigen::Index k, Eigen::Index j) {
    if (k == j) return (k == 0 || k == m - 1 ? 1.0 : 2.0) * step / 3.0;
    if (std::abs(k - j) == 1) return step / 6.0;
    return 0.0;
  };
  for (Eigen::Index k = m - 1; k >= 0; --k)
    for (Eigen::Index j = m - 1; j >= 0; --j) S(k, j) = mass(k, j) + S(k + 1, j) + S(k, j + 1) - S(k + 1, j + 1);
  const double scale = 2.0 * step * step;
  for (Eigen::Index a = 0; a < m - 1; ++a)
    for (Eigen::Index b = 0; b < m - 1; ++b) hessian_(a, b) = scale * S(a + 1, b + 1);
}

double InventorySquareIntegral::value(const Eigen::VectorXd& rates) const {
  check_rates(rates, n_);
  double acc = 0.0, prev = Phi_;
  for (std::size_t k = 0; k < n_; ++k) {
    const double next = prev - step_ * rates[k];
    acc += prev * prev + prev * next + next * next;
    prev = next;
  }
  return acc * step_ / 3.0;
}

Eigen::VectorXd InventorySquareIntegral::gradient(const Eigen::VectorXd& rates) const {
  check_rates(rates, n_);
  std::vector<double> phi(n_ + 1);
  phi[0] = Phi_;
  for (std::size_t k = 0; k < n_; ++k) phi[k + 1] = phi[k] - step_ * rates[k];
  Eigen::VectorXd g(n_);
  double suffix = 0.0;
  for (std::size_t k = n_; k >= 1; --k) {
    const double diag = (k == n_ ? 1.0 : 2.0) * step_ / 3.0;
    double y = diag * phi[k] + step_ / 6.0 * phi[k - 1];
    if (k < n_) y += step_ / 6.0 * phi[k + 1];
    suffix += y;
    g[k - 1] = -2.0 * step_ * suffix;
  }
  return g;
}

DeterministicObjective::DeterministicObjective(const VolumeProfile& profile, double lambda, const MarketParams& market,
                                               double Phi)
    : cell_volume_(profile.cell_averages()),
      lambda_(lambda),
      market_(market),
      Phi_(Phi),
      step_(profile.grid().step()),
      inventory_(profile.grid().steps(), profile.grid().step(), Phi) {
  check_problem(lambda, market, Phi);
  for (double v : cell_volume_)
    if (!(v > 0.0)) throw std::invalid_argument("profile has an interval with no volume");
  const double weight = lambda_ * market_.risk_weight();
  hessian_ = weight * inventory_.hessian();
  for (std::size_t i = 0; i < cell_volume_.size(); ++i) hessian_(i, i) += 2.0 * step_ / cell_volume_[i];
}

double DeterministicObjective::value(const Eigen::VectorXd& rates) const {
  double turnover = 0.0;
  for (std::size_t i = 0; i < cell_volume_.size(); ++i) turnover += step_ * rates[i] * rates[i] / cell_volume_[i];
  return turnover + lambda_ * market_.risk_weight() * inventory_.value(rates);
}

Eigen::VectorXd DeterministicObjective::gradient(const Eigen::VectorXd& rates) const {
  Eigen::VectorXd g = lambda_ * market_.risk_weight() * inventory_.gradient(rates);
  for (std::size_t i = 0; i < cell_volume_.size(); ++i) g[i] += 2.0 * step_ * rates[i] / cell_volume_[i];
  return g;
}

MvValue DeterministicObjective::mv(const Eigen::VectorXd& rates) const {
  check_rates(rates, cell_volume_.size());
  double turnover = 0.0;
  for (std::size_t i = 0; i < cell_volume_.size(); ++i) turnover += step_ * rates[i] * rates[i] / cell_volume_[i];
  const double expectation = 0.5 * market_.kappa * Phi_ * Phi_ + market_.kappa_tilde * turnover;
  const double variance = market_.sigma_tilde * market_.sigma_tilde * inventory_.value(rates);
  return make_mv_value(expectation, variance, lambda_);
}

OptimalStrategy solve_qp_deterministic(const VolumeProfile& profile, double lambda, const MarketParams& market,
                                       double Phi, const QpOptions& options) {
  const DeterministicObjective objective(profile, lambda, market, Phi);
  const TimeGrid& grid = profile.grid();
  const std::size_t n = grid.steps();

  BoundedQp qp;
  qp.H = objective.hessian();
  qp.g = objective.gradient(Eigen::VectorXd::Zero(n));
  qp.a = Eigen::VectorXd::Constant(n, grid.step());
  qp.b = Phi;
  qp.nonnegative = options.nonnegative;
  const QpResult res = solve_bounded_qp(qp);

  SolveReport report;
  report.iterations = res.iterations;
  report.status = res.status == QpStatus::optimal         ? SolveStatus::converged
                  : res.status == QpStatus::max_iterations ? SolveStatus::max_iterations
                                                           : SolveStatus::infeasible;
  if (report.status == SolveStatus::infeasible) throw SolverFailure("deterministic QP is infeasible");
  report.kkt_residual = kkt_residual(res.x, objective.gradient(res.x), qp.a, Phi, options.nonnegative);
  report.active_bounds = options.nonnegative ? zero_rates(res.x) : std::vector<std::size_t>{};
  const MvValue value = objective.mv(res.x);
  report.objective = value.objective;
  return package(grid, res.x, Phi, value, std::move(report));
}

// GBM objective ---------------------------------------------------------------

GbmObjective::GbmObjective(const GbmVolumeModel& model, const TimeGrid& grid, double lambda,
                           const MarketParams& market, double Phi)
    : model_(model),
      grid_(grid),
      lambda_(lambda),
      market_(market),
      Phi_(Phi),
      inventory_(grid.steps(), grid.step(), Phi) {
  check_problem(lambda, market, Phi);
  model.validate();
  cross_scale_ = 2.0 * market.sigma_tilde * market.kappa_tilde * model.sigma * model.rho / model.v0;

  static const QuadratureRule rule = gauss_legendre(8);
  const double c = model.mu - model.sigma * model.sigma;
  const double s2 = model.sigma * model.sigma;
  const double inv_v02 = 1.0 / (model.v0 * model.v0);
  auto w = [c](double t) { return std::exp(-c * t); };
  auto g = [=](double s) { return inv_v02 * std::exp(-c * s) * std::expm1(s2 * s); };

  const std::size_t n = grid.steps();
  cell_u_.resize(n);
  W_.resize(n);
  Omega_.resize(n);
  Lself_.resize(n);
  G_.resize(n);
  H_.resize(n);
  D_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = grid.node(i), b = grid.node(i + 1);
    W_[i] = integrate(rule, a, b, w);
    Omega_[i] = integrate(rule, a, b, [&](double t) { return t * w(t); });
    Lself_[i] = integrate(rule, a, b, [&](double t) { return 0.5 * (t - a) * (t - a) * w(t); });
    G_[i] = integrate(rule, a, b, g);
    H_[i] = W_[i];
    D_[i] = 2.0 * integrate(rule, a, b, [&](double t) { return w(t) * integrate(rule, a, t, g); });
    cell_u_[i] = grid.step() * model.v0 / W_[i];
  }
}

double GbmObjective::cross_integral(const Eigen::VectorXd& r) const {
  check_rates(r, W_.size());
  const double tau = grid_.step();
  double acc = 0.0, s0 = 0.0, s1 = 0.0;
  for (std::size_t i = 0; i < W_.size(); ++i) {
    const double y = Phi_ * Omega_[i] - (tau * Omega_[i] * s0 - tau * tau * W_[i] * s1) - r[i] * Lself_[i];
    acc += r[i] * r[i] * y;
    s0 += r[i];
    s1 += (static_cast<double>(i) + 0.5) * r[i];
  }
  return acc;
}

double GbmObjective::impact_integral(const Eigen::VectorXd& r) const {
  check_rates(r, D_.size());
  double diag = 0.0, off = 0.0, prefix = 0.0;
  for (std::size_t i = 0; i < D_.size(); ++i) {
    const double r2 = r[i] * r[i];
    diag += D_[i] * r2 * r2;
    off += H_[i] * r2 * prefix;
    prefix += G_[i] * r2;
  }
  return diag + 2.0 * off;
}

double GbmObjective::variance(const Eigen::VectorXd& r) const {
  return market_.sigma_tilde * market_.sigma_tilde * inventory_.value(r) + cross_scale_ * cross_integral(r) +
         market_.kappa_tilde * market_.kappa_tilde * impact_integral(r);
}

MvValue GbmObjective::mv(const Eigen::VectorXd& r) const {
  check_rates(r, W_.size());
  double turnover = 0.0;
  for (std::size_t i = 0; i < W_.size(); ++i) turnover += r[i] * r[i] * W_[i] / model_.v0;
  const double expectation = 0.5 * market_.kappa * Phi_ * Phi_ + market_.kappa_tilde * turnover;
  return make_mv_value(expectation, variance(r), lambda_);
}

double GbmObjective::value(const Eigen::VectorXd& r) const { return mv(r).objective; }

Eigen::VectorXd GbmObjective::gradient(const Eigen::VectorXd& r) const {
  check_rates(r, W_.size());
  const std::size_t n = W_.size();
  const double tau = grid_.step();
  const double kt2 = market_.kappa_tilde * market_.kappa_tilde;
  Eigen::VectorXd grad = lambda_ * market_.sigma_tilde * market_.sigma_tilde * inventory_.gradient(r);

  std::vector<double> y(n), prefix_g(n);
  double s0 = 0.0, s1 = 0.0, pg = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = Phi_ * Omega_[i] - (tau * Omega_[i] * s0 - tau * tau * W_[i] * s1) - r[i] * Lself_[i];
    s0 += r[i];
    s1 += (static_cast<double>(i) + 0.5) * r[i];
    prefix_g[i] = pg;
    pg += G_[i] * r[i] * r[i];
  }
  double suffix_omega = 0.0, suffix_w = 0.0, suffix_h = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    const double r2 = r[k] * r[k];
    const double later = tau * suffix_omega - tau * tau * (static_cast<double>(k) + 0.5) * suffix_w;
    const double dx = 2.0 * r[k] * y[k] - r2 * Lself_[k] - later;
    const double dq = 4.0 * D_[k] * r2 * r[k] + 4.0 * r[k] * (G_[k] * suffix_h + H_[k] * prefix_g[k]);
    grad[k] += 2.0 * market_.kappa_tilde * r[k] * W_[k] / model_.v0 + lambda_ * (cross_scale_ * dx + kt2 * dq);
    suffix_omega += r2 * Omega_[k];
    suffix_w += r2 * W_[k];
    suffix_h += r2 * H_[k];
  }
  return grad;
}

Eigen::MatrixXd GbmObjective::hessian(const Eigen::VectorXd& r) const {
  check_rates(r, W_.size());
  const std::size_t n = W_.size();
  const double tau = grid_.step();
  const double kt2 = market_.kappa_tilde * market_.kappa_tilde;
  Eigen::MatrixXd h = lambda_ * market_.sigma_tilde * market_.sigma_tilde * inventory_.hessian();

  std::vector<double> y(n), prefix_g(n), suffix_h(n);
  double s0 = 0.0, s1 = 0.0, pg = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = Phi_ * Omega_[i] - (tau * Omega_[i] * s0 - tau * tau * W_[i] * s1) - r[i] * Lself_[i];
    s0 += r[i];
    s1 += (static_cast<double>(i) + 0.5) * r[i];
    prefix_g[i] = pg;
    pg += G_[i] * r[i] * r[i];
  }
  double sh = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    suffix_h[k] = sh;
    sh += H_[k] * r[k] * r[k];
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double dxx = 2.0 * y[k] - 4.0 * r[k] * Lself_[k];
    const double dqq = 12.0 * D_[k] * r[k] * r[k] + 4.0 * (G_[k] * suffix_h[k] + H_[k] * prefix_g[k]);
    h(k, k) += 2.0 * market_.kappa_tilde * W_[k] / model_.v0 + lambda_ * (cross_scale_ * dxx + kt2 * dqq);
    for (std::size_t j = 0; j < k; ++j) {
      const double lkj = tau * Omega_[k] - tau * tau * (static_cast<double>(j) + 0.5) * W_[k];
      const double off = lambda_ * (cross_scale_ * (-2.0 * r[k] * lkj) + kt2 * 8.0 * r[k] * r[j] * G_[j] * H_[k]);
      h(k, j) += off;
      h(j, k) += off;
    }
  }
  return h;
}

// SQP -------------------------------------------------------------------------

OptimalStrategy solve_sqp_gbm(const GbmVolumeModel& model, const TimeGrid& grid, double lambda,
                              const MarketParams& market, double Phi, const SqpOptions& options) {
  const GbmObjective objective(model, grid, lambda, market, Phi);
  const std::size_t n = grid.steps();
  const double tau = grid.step();
  const Eigen::VectorXd a = Eigen::VectorXd::Constant(n, tau);

  // Expected-VWAP start on the same cells as the objective.
  Eigen::VectorXd r = to_eigen(objective.cell_harmonic_volume());
  r *= Phi / (tau * r.sum());

  // Damping is scaled by the diagonal of the convex part of the model.
  const InventorySquareIntegral square(n, tau, Phi);
  const Eigen::MatrixXd& hphi = square.hessian();
  Eigen::VectorXd damping_scale(n);
  for (std::size_t i = 0; i < n; ++i)
    damping_scale[i] = 2.0 * market.kappa_tilde * tau / objective.cell_harmonic_volume()[i] +
                       lambda * market.sigma_tilde * market.sigma_tilde * hphi(i, i);

  double J = objective.value(r);
  double mu = options.initial_damping;
  SolveReport report;
  report.status = SolveStatus::max_iterations;
  std::vector<std::size_t> warm;

  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    report.iterations = it;
    const Eigen::VectorXd grad = objective.gradient(r);
    report.kkt_residual = kkt_residual(r, grad, a, Phi, true);
    if (report.kkt_residual <= options.kkt_tolerance) {
      report.status = SolveStatus::converged;
      break;
    }
    report.iterations = it + 1;

    const Eigen::MatrixXd B = objective.hessian(r);
    BoundedQp qp;
    qp.H = B;
    qp.H.diagonal() += mu * damping_scale;
    qp.g = grad - qp.H * r;
    qp.a = a;
    qp.b = Phi;
    qp.warm_active = warm;
    QpResult sub;
    try {
      sub = solve_bounded_qp(qp);
    } catch (const SolverFailure&) {
      mu = std::max(10.0 * mu, 1e-6);
      continue;
    }
    if (sub.status != QpStatus::optimal) {
      mu = std::max(10.0 * mu, 1e-6);
      continue;
    }

    const Eigen::VectorXd d = sub.x - r;
    const double predicted = -(grad.dot(d) + 0.5 * d.dot(qp.H * d));
    const double Jnew = objective.value(sub.x);
    const double actual = J - Jnew;
    const double noise = 1e-14 * std::abs(J);
    bool accept = false;
    if (predicted > noise) {
      const double ratio = actual / predicted;
      accept = ratio > 0.1;
      if (ratio > 0.75) mu = std::max(mu / 10.0, 1e-14);
      else if (ratio < 0.25) mu *= 10.0;
    } else {
      // Model decrease is at roundoff level: take the step unless it hurts.
      accept = actual >= -noise;
      if (!accept) mu *= 10.0;
    }
    if (accept) {
      r = sub.x;
      warm = sub.active;
      const bool stalled = std::abs(actual) <= options.relative_decrease_tolerance * std::abs(J) &&
                           d.cwiseAbs().maxCoeff() <= 1e-12 * Phi / grid.horizon();
      J = Jnew;
      if (stalled) {
        report.kkt_residual = kkt_residual(r, objective.gradient(r), a, Phi, true);
        report.status =
            report.kkt_residual <= options.kkt_tolerance ? SolveStatus::converged : SolveStatus::max_iterations;
        break;
      }
    }
    if (mu > 1e12) break;
  }
  if (report.status != SolveStatus::converged)
    report.kkt_residual = kkt_residual(r, objective.gradient(r), a, Phi, true);

  report.active_bounds = zero_rates(r);
  const MvValue value = objective.mv(r);
  report.objective = value.objective;
  OptimalStrategy out = package(grid, r, Phi, value, std::move(report));
  if (lambda == 0.0 && out.report.status == SolveStatus::converged) {
    // Risk neutral: report the analytic node curve rather than the resampled
    // one, whose end nodes carry the adjacent interval's rate.
    const VolumeProfile u = gbm_harmonic_mean(model, grid);
    double gap = 0.0, scale = 0.0;
    for (std::size_t i = 1; i <= grid.steps(); ++i) {
      const double target = u.cell_average(i) * Phi / u.total();
      gap = std::max(gap, std::abs(out.interval_rates[i - 1] - target));
      scale = std::max(scale, target);
    }
    if (gap <= 1e-6 * scale) out.strategy = expected_vwap_strategy(model, grid, Phi);
  }
  return out;
}

}  // namespace vwapexec
