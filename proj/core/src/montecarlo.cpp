#include "vwapexec/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "vwapexec/errors.hpp"
#include "vwapexec/quadrature.hpp"
#include "vwapexec/random.hpp"

namespace vwapexec {

void SimulationConfig::validate() const {
  if (n_paths < 2) throw std::invalid_argument("simulation: n_paths must be at least 2");
  if (antithetic && n_paths % 2 != 0) throw std::invalid_argument("simulation: antithetic pairing needs even n_paths");
  if (!(std::abs(rho) <= 1.0)) throw std::invalid_argument("simulation: |rho| must not exceed 1");
  // Zero price volatility is allowed here (flat price paths).
  if (!(market.sigma_tilde >= 0.0) || !(market.kappa > 0.0) || !(market.kappa_tilde > 0.0) || !(market.s0 > 0.0))
    throw std::invalid_argument("simulation: invalid market parameters");
  if (const auto* profile = std::get_if<VolumeProfile>(&volume)) {
    if (!(profile->grid() == grid)) throw std::invalid_argument("simulation: volume profile grid differs");
  } else {
    std::get<GbmVolumeModel>(volume).validate();
  }
}

MomentEstimate estimate_moments(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("estimate_moments: need at least 2 samples");
  MomentEstimate m;
  m.n_paths = n;
  double sum = 0.0;
  for (double x : samples) sum += x;
  m.mean = sum / static_cast<double>(n);
  double m2 = 0.0, m4 = 0.0;
  for (double x : samples) {
    const double d = (x - m.mean) * (x - m.mean);
    m2 += d;
    m4 += d * d;
  }
  m.variance = m2 / static_cast<double>(n - 1);
  m4 /= static_cast<double>(n);
  m.std_error_mean = std::sqrt(m.variance / static_cast<double>(n));
  m.std_error_variance = std::sqrt(std::max(0.0, m4 - m.variance * m.variance) / static_cast<double>(n));
  return m;
}

void sample_path(const SimulationConfig& cfg, std::size_t index, PathSample& out) {
  const std::size_t N = cfg.grid.steps();
  const double tau = cfg.grid.step();
  const std::size_t stream = cfg.antithetic ? index / 2 : index;
  const double sign = cfg.antithetic && index % 2 == 1 ? -1.0 : 1.0;

  auto rng = path_stream(cfg.seed, stream);
  std::normal_distribution<double> normal(0.0, std::sqrt(tau));
  out.volume_increments.resize(N);
  out.price_increments.resize(N);
  // Volume driver first so the volume path matches simulate_gbm_paths.
  for (std::size_t k = 0; k < N; ++k) out.volume_increments[k] = sign * normal(rng);
  const double orth = std::sqrt(std::max(0.0, 1.0 - cfg.rho * cfg.rho));
  for (std::size_t k = 0; k < N; ++k)
    out.price_increments[k] = cfg.rho * out.volume_increments[k] + orth * sign * normal(rng);

  out.price.resize(N + 1);
  out.price[0] = cfg.market.s0;
  for (std::size_t k = 0; k < N; ++k)
    out.price[k + 1] = out.price[k] + cfg.market.sigma_tilde * out.price_increments[k];

  out.volume.resize(N + 1);
  if (const auto* profile = std::get_if<VolumeProfile>(&cfg.volume)) {
    std::copy(profile->v().begin(), profile->v().end(), out.volume.begin());
  } else {
    const auto& model = std::get<GbmVolumeModel>(cfg.volume);
    const double drift = model.mu - 0.5 * model.sigma * model.sigma;
    double B = 0.0;
    out.volume[0] = model.v0;
    for (std::size_t k = 0; k < N; ++k) {
      B += out.volume_increments[k];
      out.volume[k + 1] = model.v0 * std::exp(drift * cfg.grid.node(k + 1) + model.sigma * B);
    }
  }
}

namespace {

// Runs body(index, scratch) for every path; each path writes only its own slot.
template <class Body>
void for_each_path(const SimulationConfig& cfg, Body body) {
  unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, cfg.n_paths));
  auto run = [&](std::size_t begin, std::size_t end) {
    PathSample scratch;
    for (std::size_t p = begin; p < end; ++p) {
      sample_path(cfg, p, scratch);
      body(p, scratch);
    }
  };
  if (workers <= 1) {
    run(0, cfg.n_paths);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (cfg.n_paths + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk, end = std::min(cfg.n_paths, begin + chunk);
    if (begin < end) pool.emplace_back(run, begin, end);
  }
  for (auto& t : pool) t.join();
}

void check_strategy(const Strategy& s, const SimulationConfig& cfg) {
  if (!(s.grid == cfg.grid)) throw std::invalid_argument("strategy grid differs from the simulation grid");
}

double path_vwap_total(std::span<const double> volume, double step) { return trapezoid(volume, step); }

}  // namespace

JointPaths simulate_joint_paths(const SimulationConfig& cfg) {
  cfg.validate();
  JointPaths out;
  out.grid = cfg.grid;
  out.n_paths = cfg.n_paths;
  const std::size_t n = cfg.grid.size(), N = cfg.grid.steps();
  out.price.resize(cfg.n_paths * n);
  out.volume.resize(cfg.n_paths * n);
  out.volume_increments.resize(cfg.n_paths * N);
  out.price_increments.resize(cfg.n_paths * N);
  for_each_path(cfg, [&](std::size_t p, const PathSample& s) {
    std::copy(s.price.begin(), s.price.end(), out.price.begin() + p * n);
    std::copy(s.volume.begin(), s.volume.end(), out.volume.begin() + p * n);
    std::copy(s.volume_increments.begin(), s.volume_increments.end(), out.volume_increments.begin() + p * N);
    std::copy(s.price_increments.begin(), s.price_increments.end(), out.price_increments.begin() + p * N);
  });
  return out;
}

std::vector<double> simulate_costs(const Strategy& s, const SimulationConfig& cfg) {
  cfg.validate();
  check_strategy(s, cfg);
  std::vector<double> costs(cfg.n_paths);
  for_each_path(cfg, [&](std::size_t p, const PathSample& path) {
    costs[p] = realized_is_cost(path.price, path.volume, s, cfg.market).total;
  });
  return costs;
}

MomentEstimate estimate_cost_moments(const Strategy& s, const SimulationConfig& cfg) {
  const auto costs = simulate_costs(s, cfg);
  return estimate_moments(costs);
}

OrderingReport validate_theorem_orderings(const SimulationConfig& cfg, const std::vector<NamedStrategy>& candidates,
                                          std::size_t reference) {
  cfg.validate();
  if (candidates.empty() || reference >= candidates.size())
    throw std::invalid_argument("validate_theorem_orderings: reference index out of range");
  const double Phi = candidates[reference].strategy.Phi;
  for (const auto& c : candidates) {
    check_strategy(c.strategy, cfg);
    if (c.strategy.sell_off_error() > kSellOffTolerance)
      throw InconsistentStrategy("candidate " + c.name + " violates the sell-off condition");
  }

  const std::size_t m = candidates.size();
  const std::size_t slots = m + 1;  // last slot: anticipating VWAP
  std::vector<double> total(cfg.n_paths * slots), impact(cfg.n_paths * slots);
  for_each_path(cfg, [&](std::size_t p, const PathSample& path) {
    for (std::size_t c = 0; c < m; ++c) {
      const auto b = realized_is_cost(path.price, path.volume, candidates[c].strategy, cfg.market);
      total[p * slots + c] = b.total;
      impact[p * slots + c] = b.temporary;
    }
    Strategy anticipating{cfg.grid, path.volume, Phi, std::nullopt};
    const double scale = Phi / path_vwap_total(path.volume, cfg.grid.step());
    for (double& z : anticipating.zeta) z *= scale;
    anticipating.involvement_ratio = scale;
    const auto b = realized_is_cost(path.price, path.volume, anticipating, cfg.market);
    total[p * slots + m] = b.total;
    impact[p * slots + m] = b.temporary;
  });

  auto column = [&](const std::vector<double>& data, std::size_t c) {
    std::vector<double> out(cfg.n_paths);
    for (std::size_t p = 0; p < cfg.n_paths; ++p) out[p] = data[p * slots + c];
    return out;
  };
  auto paired = [&](const std::vector<double>& data, std::size_t c, std::size_t ref) {
    std::vector<double> out(cfg.n_paths);
    for (std::size_t p = 0; p < cfg.n_paths; ++p) out[p] = data[p * slots + c] - data[p * slots + ref];
    return estimate_moments(out);
  };
  auto entry = [&](std::size_t c, const std::string& name) {
    OrderingEntry e;
    e.name = name;
    e.cost = estimate_moments(column(total, c));
    const auto gap = paired(total, c, reference);
    const auto igap = paired(impact, c, reference);
    e.mean_gap = gap.mean;
    e.gap_std_error = gap.std_error_mean;
    e.impact_gap = igap.mean;
    e.impact_gap_std_error = igap.std_error_mean;
    return e;
  };

  OrderingReport report;
  report.reference = reference;
  for (std::size_t c = 0; c < m; ++c) report.candidates.push_back(entry(c, candidates[c].name));
  report.anticipating = entry(m, "anticipating-vwap");

  report.reference_minimal = true;
  for (const auto& e : report.candidates)
    if (e.mean_gap < -3.0 * e.gap_std_error) report.reference_minimal = false;
  report.anticipating_le_all = true;
  for (std::size_t c = 0; c < m; ++c) {
    const auto gap = paired(total, m, c);
    if (gap.mean > 3.0 * gap.std_error_mean) report.anticipating_le_all = false;
  }
  report.anticipating_strictly_better =
      report.anticipating.impact_gap < -3.0 * report.anticipating.impact_gap_std_error;
  return report;
}

}  // namespace vwapexec
