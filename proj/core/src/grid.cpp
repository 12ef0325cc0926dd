#include "vwapexec/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace vwapexec {

TimeGrid::TimeGrid(double horizon, std::size_t steps) : horizon_(horizon), steps_(steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("time grid: horizon must be positive");
  if (steps < 1) throw std::invalid_argument("time grid: need at least one step");
}

std::vector<double> TimeGrid::nodes() const {
  std::vector<double> t(size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = node(i);
  return t;
}

TimeGrid build_grid(double horizon, std::size_t steps) {
  if (steps < 2) throw std::invalid_argument("build_grid: N must be at least 2");
  return TimeGrid(horizon, steps);
}

}  // namespace vwapexec
