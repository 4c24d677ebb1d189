#include "mvsde/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "mvsde/error.hpp"

namespace mvsde {
namespace {

const double kPiQuarterInv = std::pow(std::numbers::pi, -0.25);

}  // namespace

double hermite_normalized(int n, double x) {
  if (n < 0) throw std::invalid_argument("hermite_normalized: negative order");
  double prev = 0.0;
  double cur = kPiQuarterInv;
  for (int j = 0; j < n; ++j) {
    const double next = x * std::sqrt(2.0 / (j + 1)) * cur - std::sqrt(static_cast<double>(j) / (j + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double phi(int k, double x) {
  if (k < 0) throw std::invalid_argument("phi: negative order");
  double prev = 0.0;
  double cur = kPiQuarterInv * std::exp(-0.5 * x * x);
  for (int j = 0; j < k; ++j) {
    const double next = x * std::sqrt(2.0 / (j + 1)) * cur - std::sqrt(static_cast<double>(j) / (j + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

void phi_all(double x, std::span<double> out) {
  if (out.empty()) return;
  out[0] = kPiQuarterInv * std::exp(-0.5 * x * x);
  if (out.size() == 1) return;
  out[1] = std::numbers::sqrt2 * x * out[0];
  for (std::size_t j = 1; j + 1 < out.size(); ++j) {
    const double jd = static_cast<double>(j);
    out[j + 1] = x * std::sqrt(2.0 / (jd + 1.0)) * out[j] - std::sqrt(jd / (jd + 1.0)) * out[j - 1];
  }
}

QuadratureRule gauss_hermite(int order) {
  if (order < 1) throw std::invalid_argument("gauss_hermite: order must be >= 1");
  const auto n = static_cast<Eigen::Index>(order);

  // Jacobi matrix of the monic Hermite recurrence: zero diagonal, off-diagonal sqrt(k/2).
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n > 1 ? n - 1 : 0);
  for (Eigen::Index k = 1; k < n; ++k) sub(k - 1) = std::sqrt(0.5 * static_cast<double>(k));

  std::vector<double> nodes(static_cast<std::size_t>(order));
  if (n == 1) {
    nodes[0] = 0.0;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      throw NumericalError("gauss_hermite: tridiagonal eigenvalue iteration did not converge");
    }
    for (Eigen::Index i = 0; i < n; ++i) nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
  }
  std::sort(nodes.begin(), nodes.end());

  // Newton polish on phi_n (same zeros as Hn_n):  dx = phi_n / (sqrt(2n) phi_{n-1}).
  std::vector<double> buf(static_cast<std::size_t>(order) + 1);
  const double sqrt2n = std::sqrt(2.0 * order);
  for (auto& x : nodes) {
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      phi_all(x, buf);
      const double dx = buf[static_cast<std::size_t>(order)] / (sqrt2n * buf[static_cast<std::size_t>(order) - 1]);
      x -= dx;
      if (std::abs(dx) <= 1e-14 * std::max(1.0, std::abs(x))) {
        converged = true;
        break;
      }
    }
    if (!converged || !std::isfinite(x)) {
      throw NumericalError("gauss_hermite: Newton polish did not converge for order " + std::to_string(order));
    }
  }

  // Enforce exact symmetry about zero.
  const std::size_t m = nodes.size();
  for (std::size_t i = 0; i < m / 2; ++i) {
    const double a = 0.5 * (nodes[m - 1 - i] - nodes[i]);
    nodes[i] = -a;
    nodes[m - 1 - i] = a;
  }
  if (m % 2 == 1) nodes[m / 2] = 0.0;

  QuadratureRule rule;
  rule.nodes = nodes;
  rule.weights.resize(m);
  rule.scaled_weights.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    // Christoffel weight for orthonormal polynomials: w = 1 / (n Hn_{n-1}(x)^2).
    phi_all(nodes[i], std::span<double>(buf.data(), m));
    const double p = buf[m - 1];
    rule.scaled_weights[i] = 1.0 / (static_cast<double>(m) * p * p);
    rule.weights[i] = rule.scaled_weights[i] * std::exp(-nodes[i] * nodes[i]);
  }
  return rule;
}

HermiteBasis::HermiteBasis(int max_order) : HermiteBasis(max_order, std::max(64, 4 * max_order)) {}

HermiteBasis::HermiteBasis(int max_order, int quadrature_order) : max_order_(max_order) {
  if (max_order < 0) throw std::invalid_argument("HermiteBasis: max_order must be >= 0");
  if (quadrature_order < 2 * max_order + 2) {
    throw std::invalid_argument("HermiteBasis: quadrature_order must be >= 2*max_order+2");
  }
  rule_ = gauss_hermite(quadrature_order);
}

std::vector<double> HermiteBasis::evaluate(double x) const {
  std::vector<double> out(static_cast<std::size_t>(max_order_) + 1);
  phi_all(x, out);
  return out;
}

std::vector<double> gaussian_expected_phi(double mean, double variance, int max_order,
                                          const QuadratureRule& rule) {
  if (max_order < 0) throw std::invalid_argument("gaussian_expected_phi: negative order");
  if (variance < 0.0) throw std::invalid_argument("gaussian_expected_phi: negative variance");
  const auto dim = static_cast<std::size_t>(max_order) + 1;
  std::vector<double> out(dim, 0.0);
  if (variance == 0.0) {
    phi_all(mean, out);
    return out;
  }
  std::vector<double> buf(dim);
  const double scale = std::sqrt(2.0 * variance);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    phi_all(mean + scale * rule.nodes[q], buf);
    for (std::size_t k = 0; k < dim; ++k) out[k] += rule.weights[q] * buf[k];
  }
  const double norm = 1.0 / std::sqrt(std::numbers::pi);
  for (auto& v : out) v *= norm;
  return out;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  if (n < 2) throw std::invalid_argument("uniform_grid: need at least two points");
  if (!(hi > lo)) throw std::invalid_argument("uniform_grid: empty interval");
  std::vector<double> g(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + step * static_cast<double>(i);
  g.back() = hi;
  return g;
}

std::vector<double> default_bound_grid() { return uniform_grid(-10.0, 10.0, 4001); }

std::vector<PhiBound> phi_bounds(int max_order, std::span<const double> grid) {
  if (max_order < 0) throw std::invalid_argument("phi_bounds: negative order");
  const auto dim = static_cast<std::size_t>(max_order) + 1;
  std::vector<PhiBound> bounds(dim);
  for (std::size_t k = 0; k < dim; ++k) bounds[k].k = static_cast<int>(k);
  std::vector<double> buf(dim + 1);
  for (double x : grid) {
    phi_all(x, buf);
    for (std::size_t k = 0; k < dim; ++k) {
      const double kd = static_cast<double>(k);
      const double lower = k > 0 ? std::sqrt(kd / 2.0) * buf[k - 1] : 0.0;
      const double deriv = lower - std::sqrt((kd + 1.0) / 2.0) * buf[k + 1];
      bounds[k].sup = std::max(bounds[k].sup, std::abs(buf[k]));
      bounds[k].lipschitz = std::max(bounds[k].lipschitz, std::abs(deriv));
    }
  }
  return bounds;
}

std::vector<PhiBound> phi_bounds(int max_order) {
  const auto grid = default_bound_grid();
  return phi_bounds(max_order, grid);
}

}  // namespace mvsde
