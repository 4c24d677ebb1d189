#include "mvsde/gamma_table.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mvsde {

GammaTable::GammaTable(int max_order, TimeGrid grid, int picard_step)
    : max_order_(max_order), grid_(grid), picard_step_(picard_step) {
  if (max_order < 0) throw std::invalid_argument("GammaTable: max_order must be >= 0");
  values_.assign(static_cast<std::size_t>(max_order + 1) * static_cast<std::size_t>(num_nodes()), 0.0);
}

std::size_t GammaTable::index(int k, int j) const {
  if (k < 0 || k > max_order_ || j < 0 || j >= num_nodes()) throw std::out_of_range("GammaTable: index out of range");
  return static_cast<std::size_t>(k) * static_cast<std::size_t>(num_nodes()) + static_cast<std::size_t>(j);
}

std::vector<double> GammaTable::column(int j) const {
  std::vector<double> out(static_cast<std::size_t>(max_order_) + 1);
  for (int k = 0; k <= max_order_; ++k) out[static_cast<std::size_t>(k)] = at(k, j);
  return out;
}

void GammaTable::set_column(int j, std::span<const double> gamma) {
  if (gamma.size() != static_cast<std::size_t>(max_order_) + 1) throw std::invalid_argument("GammaTable: column size mismatch");
  for (int k = 0; k <= max_order_; ++k) at(k, j) = gamma[static_cast<std::size_t>(k)];
}

double GammaTable::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

GammaTable GammaTable::constant(std::span<const double> gamma, TimeGrid grid, int picard_step) {
  if (gamma.empty()) throw std::invalid_argument("GammaTable::constant: empty column");
  GammaTable table(static_cast<int>(gamma.size()) - 1, grid, picard_step);
  for (int j = 0; j < table.num_nodes(); ++j) table.set_column(j, gamma);
  return table;
}

void interpolate_gamma(const GammaTable& table, double t, std::span<double> out) {
  const TimeGrid& g = table.grid();
  if (!(t >= 0.0 && t <= g.horizon())) throw std::invalid_argument("interpolate_gamma: t outside [0, T]");
  if (out.size() != static_cast<std::size_t>(table.max_order()) + 1) {
    throw std::invalid_argument("interpolate_gamma: output size mismatch");
  }
  const double u = t / g.horizon() * g.num_steps();
  const int j = std::min(static_cast<int>(std::floor(u)), g.num_steps() - 1);
  const double f = u - j;
  for (int k = 0; k <= table.max_order(); ++k) {
    const double a = table.at(k, j);
    const double b = table.at(k, j + 1);
    out[static_cast<std::size_t>(k)] = f == 0.0 ? a : (f == 1.0 ? b : a + f * (b - a));
  }
}

std::vector<double> interpolate_gamma(const GammaTable& table, double t) {
  std::vector<double> out(static_cast<std::size_t>(table.max_order()) + 1);
  interpolate_gamma(table, t, out);
  return out;
}

}  // namespace mvsde
