#include "mvsde/density.hpp"

#include <cmath>
#include <stdexcept>

#include "mvsde/basis.hpp"

namespace mvsde {

std::vector<double> default_density_grid() { return uniform_grid(-8.0, 8.0, 1601); }

DensityEstimate reconstruct(std::span<const double> gamma, std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("reconstruct: empty grid");
  if (gamma.empty()) throw std::invalid_argument("reconstruct: empty coefficient vector");
  DensityEstimate est;
  est.grid.assign(grid.begin(), grid.end());
  est.values.resize(grid.size());
  est.K = static_cast<int>(gamma.size()) - 1;
  std::vector<double> buf(gamma.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    phi_all(grid[i], buf);
    double s = 0.0;
    for (std::size_t k = 0; k < gamma.size(); ++k) s += gamma[k] * buf[k];
    est.values[i] = s;
  }
  return est;
}

double parseval_mse(std::span<const double> gamma_a, std::span<const double> gamma_ref,
                    std::span<const double> tail_ref) {
  if (gamma_a.size() != gamma_ref.size()) throw std::invalid_argument("parseval_mse: length mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < gamma_a.size(); ++k) s += (gamma_a[k] - gamma_ref[k]) * (gamma_a[k] - gamma_ref[k]);
  for (double v : tail_ref) s += v * v;
  return s;
}

double trapezoid(std::span<const double> grid, std::span<const double> values) {
  if (grid.size() != values.size()) throw std::invalid_argument("trapezoid: size mismatch");
  double s = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) s += 0.5 * (grid[i] - grid[i - 1]) * (values[i] + values[i - 1]);
  return s;
}

double l2_distance(std::span<const double> grid, std::span<const double> a, std::span<const double> b) {
  if (a.size() != grid.size() || b.size() != grid.size()) throw std::invalid_argument("l2_distance: size mismatch");
  std::vector<double> d2(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) d2[i] = (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(trapezoid(grid, d2));
}

DensityEstimate nonneg_fix(const DensityEstimate& est) {
  DensityEstimate out = est;
  std::vector<double> negative(est.values.size());
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (out.values[i] < 0.0) {
      negative[i] = -out.values[i];
      out.values[i] = 0.0;
    }
  }
  const double mass = trapezoid(out.grid, out.values);
  if (!(mass > 0.0)) throw std::domain_error("nonneg_fix: no positive mass left after clipping");
  for (auto& v : out.values) v /= mass;
  out.clipped_mass = trapezoid(out.grid, negative);
  return out;
}

double density_epsilon(double eps0) {
  if (!(eps0 > 0.0) || !(eps0 < 1.0)) throw std::invalid_argument("density_epsilon: need 0 < eps0 < 1");
  return eps0 / std::sqrt(std::abs(std::log(eps0)));
}

}  // namespace mvsde
