#pragma once

namespace vwapexec {

/// Linear permanent impact kappa * zeta, temporary impact kappa_tilde * zeta / v,
/// and unaffected price S0_t = s0 + sigma_tilde * B~_t.
struct MarketParams {
  double kappa = 0.1;
  double kappa_tilde = 0.02;
  double sigma_tilde = 0.1;
  double s0 = 100.0;

  /// Throws std::invalid_argument unless every field is strictly positive.
  void validate() const;

  /// sigma_tilde^2 / kappa_tilde, the inventory-risk weight per unit lambda.
  double risk_weight() const noexcept { return sigma_tilde * sigma_tilde / kappa_tilde; }
};

}  // namespace vwapexec
