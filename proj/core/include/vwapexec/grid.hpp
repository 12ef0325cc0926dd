#pragma once

#include <cstddef>
#include <vector>

namespace vwapexec {

/// Uniform discretization t_i = i T / N of [0, T]. Every curve in the library
/// (volume, rates, inventory, prices) is sampled on one of these.
class TimeGrid {
 public:
  TimeGrid() = default;  // [0, 1] in one step
  TimeGrid(double horizon, std::size_t steps);

  double horizon() const noexcept { return horizon_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t size() const noexcept { return steps_ + 1; }
  double step() const noexcept { return horizon_ / static_cast<double>(steps_); }

  double node(std::size_t i) const noexcept {
    return i == steps_ ? horizon_ : horizon_ * static_cast<double>(i) / static_cast<double>(steps_);
  }
  std::vector<double> nodes() const;

  // Left and right end of interval i, 1 <= i <= N.
  double interval_begin(std::size_t i) const noexcept { return node(i - 1); }
  double interval_end(std::size_t i) const noexcept { return node(i); }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double horizon_ = 1.0;
  std::size_t steps_ = 1;
};

/// Checked constructor: T > 0 and N >= 2, otherwise std::invalid_argument.
TimeGrid build_grid(double horizon, std::size_t steps);

}  // namespace vwapexec
