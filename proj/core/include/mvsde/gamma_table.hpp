#pragma once

#include <span>
#include <vector>

#include "mvsde/time_grid.hpp"

namespace mvsde {

/// Coefficients gamma_k(t_j), k = 0..K, on every node of a time grid.
class GammaTable {
 public:
  GammaTable(int max_order, TimeGrid grid, int picard_step = 0);

  int max_order() const noexcept { return max_order_; }
  const TimeGrid& grid() const noexcept { return grid_; }
  int picard_step() const noexcept { return picard_step_; }
  int num_nodes() const noexcept { return grid_.num_steps() + 1; }

  double& at(int k, int j) { return values_[index(k, j)]; }
  double at(int k, int j) const { return values_[index(k, j)]; }

  std::vector<double> column(int j) const;
  void set_column(int j, std::span<const double> gamma);

  /// Largest |entry|.
  double max_abs() const noexcept;

  /// Table with the same column at every node.
  static GammaTable constant(std::span<const double> gamma, TimeGrid grid, int picard_step = 0);

 private:
  std::size_t index(int k, int j) const;

  int max_order_;
  TimeGrid grid_;
  int picard_step_;
  std::vector<double> values_;  // row-major (K+1) x nodes
};

/// Linear interpolation in time between adjacent columns; exact at nodes.
/// Throws std::invalid_argument for t outside [0, T].
void interpolate_gamma(const GammaTable& table, double t, std::span<double> out);
std::vector<double> interpolate_gamma(const GammaTable& table, double t);

}  // namespace mvsde
