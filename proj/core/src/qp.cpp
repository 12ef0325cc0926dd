#include "vwapexec/qp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vwapexec/errors.hpp"

namespace vwapexec {

namespace {

struct EqpStep {
  Eigen::VectorXd x;
  double nu = 0.0;
};

// minimize 1/2 x'Hx + g'x over the free coordinates with a'x = b, others held at 0.
EqpStep solve_equality(const BoundedQp& qp, const std::vector<Eigen::Index>& free) {
  const Eigen::Index n = qp.g.size();
  const Eigen::MatrixXd Hf = qp.H(free, free);
  const Eigen::VectorXd gf = qp.g(free);
  const Eigen::VectorXd af = qp.a(free);
  Eigen::LLT<Eigen::MatrixXd> llt(Hf);
  if (llt.info() != Eigen::Success) throw SolverFailure("reduced Hessian is not positive definite");
  const Eigen::VectorXd Hg = llt.solve(gf);
  const Eigen::VectorXd Ha = llt.solve(af);
  const double aHa = af.dot(Ha);
  if (!(aHa > 0.0) || !std::isfinite(aHa)) throw SolverFailure("KKT system is singular");
  EqpStep step;
  step.nu = -(qp.b + af.dot(Hg)) / aHa;
  step.x = Eigen::VectorXd::Zero(n);
  step.x(free) = -(Hg + step.nu * Ha);
  return step;
}

void check_shapes(const BoundedQp& qp) {
  const Eigen::Index n = qp.g.size();
  if (n == 0) throw std::invalid_argument("solve_bounded_qp: empty problem");
  if (qp.H.rows() != n || qp.H.cols() != n || qp.a.size() != n)
    throw std::invalid_argument("solve_bounded_qp: dimension mismatch");
}

}  // namespace

QpResult solve_bounded_qp(const BoundedQp& qp, std::size_t max_iterations) {
  check_shapes(qp);
  const Eigen::Index n = qp.g.size();
  QpResult result;
  result.bound_multipliers = Eigen::VectorXd::Zero(n);

  if (!qp.nonnegative) {
    std::vector<Eigen::Index> all(n);
    for (Eigen::Index i = 0; i < n; ++i) all[i] = i;
    auto step = solve_equality(qp, all);
    result.x = std::move(step.x);
    result.multiplier = step.nu;
    return result;
  }

  if (max_iterations == 0) max_iterations = 4 * static_cast<std::size_t>(n) + 10;

  // Feasible start: spread b over the free coordinates with positive a.
  std::vector<bool> active(n, false);
  for (std::size_t i : qp.warm_active)
    if (static_cast<Eigen::Index>(i) < n) active[i] = true;
  auto feasible_start = [&]() {
    double mass = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (!active[i] && qp.a[i] > 0.0) mass += qp.a[i];
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    if (!(mass > 0.0)) return x;
    for (Eigen::Index i = 0; i < n; ++i)
      if (!active[i] && qp.a[i] > 0.0) x[i] = qp.b / mass;
    return x;
  };
  if (qp.b < 0.0 && (qp.a.array() >= 0.0).all()) {
    result.status = QpStatus::infeasible;
    result.x = Eigen::VectorXd::Zero(n);
    return result;
  }
  Eigen::VectorXd x = feasible_start();
  if (std::abs(qp.a.dot(x) - qp.b) > 1e-12 * std::max(1.0, std::abs(qp.b))) {
    std::fill(active.begin(), active.end(), false);
    x = feasible_start();
  }
  // Coordinates with a_i <= 0 start at zero and sit on their bound.
  for (Eigen::Index i = 0; i < n; ++i)
    if (x[i] == 0.0) active[i] = true;

  const double gscale = std::max(1.0, qp.g.cwiseAbs().maxCoeff());
  for (std::size_t it = 0; it < max_iterations; ++it) {
    result.iterations = it + 1;
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < n; ++i)
      if (!active[i]) free.push_back(i);
    if (free.empty()) {
      result.status = QpStatus::infeasible;
      break;
    }
    EqpStep step = solve_equality(qp, free);

    // Largest step toward the equality solution that keeps x >= 0.
    double alpha = 1.0;
    Eigen::Index blocking = -1;
    for (Eigen::Index i : free) {
      if (step.x[i] < 0.0) {
        const double ratio = x[i] / (x[i] - step.x[i]);
        if (ratio < alpha) {
          alpha = ratio;
          blocking = i;
        }
      }
    }
    if (blocking >= 0) {
      x += alpha * (step.x - x);
      x[blocking] = 0.0;
      active[blocking] = true;
      for (Eigen::Index i : free)
        if (x[i] < 0.0) x[i] = 0.0;
      continue;
    }

    x = step.x;
    const Eigen::VectorXd residual = qp.H * x + qp.g + step.nu * qp.a;
    Eigen::Index release = -1;
    double most_negative = -1e-12 * (gscale + std::abs(step.nu) * qp.a.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < n; ++i) {
      if (active[i] && residual[i] < most_negative) {
        most_negative = residual[i];
        release = i;
      }
    }
    result.multiplier = step.nu;
    if (release < 0) {
      for (Eigen::Index i = 0; i < n; ++i)
        if (active[i]) {
          result.active.push_back(static_cast<std::size_t>(i));
          result.bound_multipliers[i] = std::max(0.0, residual[i]);
        }
      result.x = std::move(x);
      result.status = QpStatus::optimal;
      return result;
    }
    active[release] = false;
  }

  if (result.status != QpStatus::infeasible) result.status = QpStatus::max_iterations;
  for (Eigen::Index i = 0; i < n; ++i)
    if (active[i]) result.active.push_back(static_cast<std::size_t>(i));
  result.x = std::move(x);
  return result;
}

double kkt_residual(const Eigen::VectorXd& x, const Eigen::VectorXd& gradient, const Eigen::VectorXd& a, double b,
                    bool nonnegative, double* multiplier_out) {
  const Eigen::Index n = x.size();
  if (gradient.size() != n || a.size() != n) throw std::invalid_argument("kkt_residual: dimension mismatch");
  // Least-squares multiplier from the free coordinates.
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (nonnegative && x[i] <= 0.0) continue;
    num += a[i] * gradient[i];
    den += a[i] * a[i];
  }
  const double nu = den > 0.0 ? -num / den : 0.0;
  if (multiplier_out) *multiplier_out = nu;

  const double unit = std::max(1.0, std::abs(nu));
  double worst = std::abs(a.dot(x) - b) / std::max(1.0, std::abs(b));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double scale = std::max(std::abs(a[i]), 1e-300) * unit;
    const double stationarity = gradient[i] + nu * a[i];
    if (nonnegative && x[i] <= 0.0)
      worst = std::max(worst, std::max(0.0, -stationarity) / scale);
    else
      worst = std::max(worst, std::abs(stationarity) / scale);
    if (nonnegative) worst = std::max(worst, std::max(0.0, -x[i]));
  }
  return worst;
}

}  // namespace vwapexec
