#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vwapexec {

/// Composite trapezoid over uniformly spaced samples.
double trapezoid(std::span<const double> values, double step);

/// Running trapezoid integral; element i holds the integral up to node i.
std::vector<double> cumulative_trapezoid(std::span<const double> values, double step);

/// Trapezoid weights (step/2 at the ends, step elsewhere).
std::vector<double> trapezoid_weights(std::size_t n_nodes, double step);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(std::size_t n);

/// Gauss-Hermite rule for the weight exp(-x^2/2) on the real line, so that
/// sum(w_i f(x_i)) approximates the integral of f(x) exp(-x^2/2) dx.
/// Built from the eigen-decomposition of the Hermite Jacobi matrix.
QuadratureRule gauss_hermite_probabilist(std::size_t n);

/// Integral of f over [a, b] with a Gauss-Legendre rule.
template <class F>
double integrate(const QuadratureRule& rule, double a, double b, F&& f) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double acc = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) acc += rule.weights[k] * f(mid + half * rule.nodes[k]);
  return half * acc;
}

}  // namespace vwapexec
