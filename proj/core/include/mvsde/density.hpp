#pragma once

#include <span>
#include <string>
#include <vector>

namespace mvsde {

struct DensityEstimate {
  std::vector<double> grid;
  std::vector<double> values;
  double t = 0.0;
  int K = 0;
  std::string source;         // "ppm", "mlmc", "chaos", ...
  int picard_step = 0;
  double clipped_mass = 0.0;  // set by nonneg_fix: trapezoid mass of the negative part removed
};

/// Default evaluation grid: 1601 points on [-8, 8].
std::vector<double> default_density_grid();

/// mu(y) = sum_k gamma_k phi_k(y) on the grid. Throws on an empty grid.
DensityEstimate reconstruct(std::span<const double> gamma, std::span<const double> grid);

/// sum_{k<=K} (a_k - ref_k)^2 + sum tail_k^2.
double parseval_mse(std::span<const double> gamma_a, std::span<const double> gamma_ref,
                    std::span<const double> tail_ref = {});

/// Trapezoid rule on a (not necessarily uniform) grid.
double trapezoid(std::span<const double> grid, std::span<const double> values);

/// Trapezoid L2 distance between two curves on one grid.
double l2_distance(std::span<const double> grid, std::span<const double> a, std::span<const double> b);

/// Clips negative values to zero and rescales to unit trapezoid mass.
/// Throws std::domain_error when nothing positive is left.
DensityEstimate nonneg_fix(const DensityEstimate& est);

/// eps = eps0 / sqrt(|log eps0|): accuracy to request from an expectation
/// estimator so that the density estimate reaches eps0.
double density_epsilon(double eps0);

}  // namespace mvsde
