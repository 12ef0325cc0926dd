#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace vwapexec {

/// minimize 1/2 x'Hx + g'x  subject to  a'x = b  and, optionally, x >= 0.
/// H must be positive definite on the free variables.
struct BoundedQp {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  Eigen::VectorXd a;
  double b = 0.0;
  bool nonnegative = true;
  /// Bounds assumed active at the start (warm start); must leave a feasible point.
  std::vector<std::size_t> warm_active;
};

enum class QpStatus { optimal, max_iterations, infeasible };

struct QpResult {
  Eigen::VectorXd x;
  double multiplier = 0.0;           // of a'x = b, sign: Hx + g + multiplier a - mu = 0
  Eigen::VectorXd bound_multipliers; // mu >= 0 on active bounds, 0 elsewhere
  std::vector<std::size_t> active;
  std::size_t iterations = 0;
  QpStatus status = QpStatus::optimal;
};

/// Primal active-set method: solve the equality-constrained problem on the
/// free set, step toward it until a bound blocks and pin that bound, release the bound with
/// the most negative multiplier, repeat. At most `max_iterations` (defaults
/// to 4n + 10) working-set changes. Throws SolverFailure if a reduced
/// Hessian is not positive definite.
QpResult solve_bounded_qp(const BoundedQp& qp, std::size_t max_iterations = 0);

/// Scaled KKT residual of x for the problem above given the gradient at x:
/// stationarity on free variables, sign of bound multipliers, primal
/// feasibility. Stationarity is measured in units of |a_i| max(1, |nu|).
double kkt_residual(const Eigen::VectorXd& x, const Eigen::VectorXd& gradient, const Eigen::VectorXd& a, double b,
                    bool nonnegative, double* multiplier_out = nullptr);

}  // namespace vwapexec
