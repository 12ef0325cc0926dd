#include "vwapexec/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace vwapexec {

double trapezoid(std::span<const double> values, double step) {
  if (values.size() < 2) return 0.0;
  double acc = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) acc += values[i];
  return acc * step;
}

std::vector<double> cumulative_trapezoid(std::span<const double> values, double step) {
  std::vector<double> out(values.size(), 0.0);
  for (std::size_t i = 1; i < values.size(); ++i) out[i] = out[i - 1] + 0.5 * step * (values[i - 1] + values[i]);
  return out;
}

std::vector<double> trapezoid_weights(std::size_t n_nodes, double step) {
  std::vector<double> w(n_nodes, step);
  if (n_nodes > 0) {
    w.front() *= 0.5;
    w.back() *= 0.5;
  }
  return w;
}

namespace {

// Golub-Welsch: nodes are eigenvalues of the symmetric Jacobi matrix, weights
// are mass * (first eigenvector component)^2.
QuadratureRule golub_welsch(std::size_t n, double mass, double (*offdiag)(std::size_t)) {
  if (n == 0) throw std::invalid_argument("quadrature rule needs at least one node");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 1; k < n; ++k) {
    const double b = offdiag(k);
    J(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k)) = b;
    J(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto idx = static_cast<Eigen::Index>(k);
    rule.nodes[k] = eig.eigenvalues()(idx);
    const double v0 = eig.eigenvectors()(0, idx);
    rule.weights[k] = mass * v0 * v0;
  }
  // Exact symmetry of both rules.
  for (std::size_t k = 0; k < n / 2; ++k) {
    const std::size_t j = n - 1 - k;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[k]);
    const double w = 0.5 * (rule.weights[j] + rule.weights[k]);
    rule.nodes[k] = -x;
    rule.nodes[j] = x;
    rule.weights[k] = rule.weights[j] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

double legendre_offdiag(std::size_t k) {
  const double kk = static_cast<double>(k);
  return kk / std::sqrt(4.0 * kk * kk - 1.0);
}

double hermite_offdiag(std::size_t k) { return std::sqrt(static_cast<double>(k)); }

}  // namespace

QuadratureRule gauss_legendre(std::size_t n) { return golub_welsch(n, 2.0, legendre_offdiag); }

QuadratureRule gauss_hermite_probabilist(std::size_t n) {
  return golub_welsch(n, std::sqrt(2.0 * std::numbers::pi), hermite_offdiag);
}

}  // namespace vwapexec
