#pragma once

#include <cmath>
#include <stdexcept>

namespace mvsde {

/// Uniform partition of [0, T]. Dyadic grids (level >= 0) have 2^level steps;
/// grids built from an arbitrary step count carry level = -1.
class TimeGrid {
 public:
  static TimeGrid dyadic(double horizon, int level) {
    if (level < 0 || level > 30) throw std::invalid_argument("TimeGrid: level must be in [0, 30]");
    return TimeGrid(horizon, 1 << level, level);
  }

  static TimeGrid uniform(double horizon, int num_steps) {
    if (num_steps < 1) throw std::invalid_argument("TimeGrid: need at least one step");
    int level = -1;
    if ((num_steps & (num_steps - 1)) == 0) {
      level = 0;
      while ((1 << level) < num_steps) ++level;
    }
    return TimeGrid(horizon, num_steps, level);
  }

  /// Grid with step h; T/h must be an integer to within 1e-9 relative.
  static TimeGrid from_step(double horizon, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("TimeGrid: step must be positive");
    const double ratio = horizon / h;
    const double steps = std::round(ratio);
    if (steps < 1.0 || std::abs(ratio - steps) > 1e-9 * steps) {
      throw std::invalid_argument("TimeGrid: T/h is not an integer");
    }
    return uniform(horizon, static_cast<int>(steps));
  }

  double horizon() const noexcept { return horizon_; }
  int num_steps() const noexcept { return num_steps_; }
  int level() const noexcept { return level_; }
  bool is_dyadic() const noexcept { return level_ >= 0; }
  double step() const noexcept { return horizon_ / num_steps_; }
  double time(int j) const noexcept { return j == num_steps_ ? horizon_ : horizon_ * j / num_steps_; }

 private:
  TimeGrid(double horizon, int num_steps, int level) : horizon_(horizon), num_steps_(num_steps), level_(level) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("TimeGrid: horizon must be positive");
  }

  double horizon_;
  int num_steps_;
  int level_;
};

}  // namespace mvsde
