#include "vwapexec/volume.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "vwapexec/quadrature.hpp"
#include "vwapexec/random.hpp"

namespace vwapexec {

VolumeProfile::VolumeProfile(TimeGrid grid, std::vector<double> v, std::vector<double> cumulative,
                             std::vector<double> cumulative_integral, std::vector<double> cumulative_square_integral)
    : grid_(grid),
      v_(std::move(v)),
      V_(std::move(cumulative)),
      calV_(std::move(cumulative_integral)),
      V2int_(std::move(cumulative_square_integral)) {
  const std::size_t n = grid_.size();
  if (v_.size() != n || V_.size() != n || calV_.size() != n || V2int_.size() != n)
    throw std::invalid_argument("volume profile: every curve needs N + 1 values");
  for (double x : v_)
    if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("volume profile: turnover must be positive");
  if (V_.front() != 0.0) throw std::invalid_argument("volume profile: V_0 must be 0");
  for (std::size_t i = 1; i < n; ++i)
    if (!(V_[i] > V_[i - 1])) throw std::invalid_argument("volume profile: V must be strictly increasing");
}

std::vector<double> VolumeProfile::cell_averages() const {
  std::vector<double> out(grid_.steps());
  for (std::size_t i = 1; i <= grid_.steps(); ++i) out[i - 1] = cell_average(i);
  return out;
}

void GbmVolumeModel::validate() const {
  if (!(v0 > 0.0)) throw std::invalid_argument("gbm model: v0 must be positive");
  if (!(sigma >= 0.0)) throw std::invalid_argument("gbm model: sigma must be nonnegative");
  if (!std::isfinite(mu)) throw std::invalid_argument("gbm model: mu must be finite");
  if (!(std::abs(rho) <= 1.0)) throw std::invalid_argument("gbm model: |rho| must be at most 1");
}

namespace {

double arcsine_density(double t) { return 1.0 / (std::numbers::pi * std::sqrt(t * (1.0 - t))); }

// (e^x - 1 - x) / x^2
double exp_remainder2(double x) {
  if (std::abs(x) >= 1.0) return (std::expm1(x) - x) / (x * x);
  double term = 0.5, sum = 0.0;
  for (int n = 2; n < 40; ++n) {
    sum += term;
    term *= x / static_cast<double>(n + 1);
  }
  return sum;
}

// (expm1(2x)/2 - 2 expm1(x) + x) / x^3 = sum_{n>=3} (2^{n-1} - 2) x^{n-3} / n!
double exp_remainder3(double x) {
  if (std::abs(x) >= 1.0) return (0.5 * std::expm1(2.0 * x) - 2.0 * std::expm1(x) + x) / (x * x * x);
  double sum = 0.0;
  double xpow = 1.0, fact = 6.0, two_pow = 4.0;  // n = 3
  for (int n = 3; n < 45; ++n) {
    sum += (two_pow - 2.0) * xpow / fact;
    xpow *= x;
    fact *= static_cast<double>(n + 1);
    two_pow *= 2.0;
  }
  return sum;
}

double exprel(double x) { return x == 0.0 ? 1.0 : std::expm1(x) / x; }

}  // namespace

VolumeProfile arcsine_profile(const TimeGrid& grid) {
  if (grid.horizon() != 1.0) throw std::invalid_argument("arcsine profile: horizon must be 1");
  const std::size_t n = grid.size();
  const double half = 0.5 * grid.step();
  std::vector<double> v(n), V(n), calV(n), V2(n);
  constexpr double pi = std::numbers::pi;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = grid.node(i);
    v[i] = arcsine_density(std::clamp(t, half, 1.0 - half));
    const double theta = std::asin(std::sqrt(t));
    const double s = std::sqrt(t * (1.0 - t));
    V[i] = 2.0 / pi * theta;
    calV[i] = 2.0 / pi * ((t - 0.5) * theta + 0.5 * s);
    V2[i] = 4.0 / (pi * pi) * (0.5 * theta * theta * (2.0 * t - 1.0) + theta * s - 0.5 * t);
  }
  V.front() = 0.0;
  calV.front() = 0.0;
  V2.front() = 0.0;
  V.back() = 1.0;
  calV.back() = 0.5;
  V2.back() = 0.5 - 2.0 / (pi * pi);
  return VolumeProfile(grid, std::move(v), std::move(V), std::move(calV), std::move(V2));
}

VolumeProfile constant_profile(const TimeGrid& grid, double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw std::invalid_argument("constant profile: turnover must be positive");
  const std::size_t n = grid.size();
  std::vector<double> v(n, rate), V(n), calV(n), V2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = grid.node(i);
    V[i] = rate * t;
    calV[i] = 0.5 * rate * t * t;
    V2[i] = rate * rate * t * t * t / 3.0;
  }
  return VolumeProfile(grid, std::move(v), std::move(V), std::move(calV), std::move(V2));
}

VolumeProfile profile_from_samples(const TimeGrid& grid, std::span<const double> samples) {
  if (samples.size() != grid.size())
    throw std::invalid_argument("profile_from_samples: expected " + std::to_string(grid.size()) + " samples, got " +
                                std::to_string(samples.size()));
  for (double x : samples)
    if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("profile_from_samples: samples must be positive");
  const double tau = grid.step();
  std::vector<double> v(samples.begin(), samples.end());
  std::vector<double> V = cumulative_trapezoid(v, tau);
  std::vector<double> calV = cumulative_trapezoid(V, tau);
  std::vector<double> squares(V.size());
  std::transform(V.begin(), V.end(), squares.begin(), [](double x) { return x * x; });
  std::vector<double> V2 = cumulative_trapezoid(squares, tau);
  return VolumeProfile(grid, std::move(v), std::move(V), std::move(calV), std::move(V2));
}

VolumeProfile gbm_harmonic_mean(const GbmVolumeModel& model, const TimeGrid& grid) {
  model.validate();
  const double c = model.mu - model.sigma * model.sigma;
  const std::size_t n = grid.size();
  std::vector<double> u(n), U(n), calU(n), U2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = grid.node(i);
    const double x = c * t;
    u[i] = model.v0 * std::exp(x);
    U[i] = model.v0 * t * exprel(x);
    calU[i] = model.v0 * t * t * exp_remainder2(x);
    U2[i] = model.v0 * model.v0 * t * t * t * exp_remainder3(x);
  }
  return VolumeProfile(grid, std::move(u), std::move(U), std::move(calU), std::move(U2));
}

VolumePathSet simulate_gbm_paths(const GbmVolumeModel& model, const TimeGrid& grid, std::size_t n_paths,
                                 std::uint64_t seed) {
  model.validate();
  if (n_paths == 0) throw std::invalid_argument("simulate_gbm_paths: n_paths must be positive");
  VolumePathSet set{grid, n_paths, seed, {}, {}};
  const std::size_t N = grid.steps();
  set.paths.resize(n_paths * grid.size());
  set.increments.resize(n_paths * N);
  const double drift = model.mu - 0.5 * model.sigma * model.sigma;
  for (std::size_t p = 0; p < n_paths; ++p) {
    auto rng = path_stream(seed, p);
    std::normal_distribution<double> normal(0.0, std::sqrt(grid.step()));
    double* v = set.paths.data() + p * grid.size();
    double* dB = set.increments.data() + p * N;
    double B = 0.0;
    v[0] = model.v0;
    for (std::size_t k = 0; k < N; ++k) {
      dB[k] = normal(rng);
      B += dB[k];
      v[k + 1] = model.v0 * std::exp(drift * grid.node(k + 1) + model.sigma * B);
    }
  }
  return set;
}

}  // namespace vwapexec
