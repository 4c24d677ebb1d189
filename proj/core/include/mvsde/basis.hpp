#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mvsde {

/// Uniform bound on |phi_k(x)| over all k and x (Cramer's inequality).
inline constexpr double kHermiteFunctionBound = 1.086435;

/// Normalised Hermite polynomial, orthonormal against exp(-x^2).
///
/// Evaluated with the normalised three-term recurrence
///   Hn_{n+1}(x) = x sqrt(2/(n+1)) Hn_n(x) - sqrt(n/(n+1)) Hn_{n-1}(x),
/// which never forms 2^n n! and stays finite for large n.
double hermite_normalized(int n, double x);

/// Hermite function phi_k(x) = Hn_k(x) exp(-x^2/2); orthonormal in L2(R).
double phi(int k, double x);

/// Writes phi_0(x), ..., phi_{out.size()-1}(x).
///
/// The Gaussian factor is carried through the recurrence, so for large |x|
/// the values underflow to zero instead of overflowing.
void phi_all(double x, std::span<double> out);

/// Gauss-Hermite rule for integrals of the form  int f(x) exp(-x^2) dx.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  /// weights[q] * exp(nodes[q]^2), computed without forming the exponential.
  /// Used to integrate against Lebesgue measure:  int g(x) dx ~ sum sw_q g(x_q).
  std::vector<double> scaled_weights;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// Order-point Gauss-Hermite rule (Golub-Welsch eigenvalues polished by Newton).
/// Exact for polynomials of degree <= 2*order-1 against exp(-x^2).
/// Throws std::invalid_argument for order < 1 and NumericalError when the
/// Newton polish fails to reach a 1e-14 node residual.
QuadratureRule gauss_hermite(int order);

/// Hermite-function basis truncated at max_order, with a quadrature rule
/// large enough to integrate products of two basis polynomials exactly.
class HermiteBasis {
 public:
  /// Uses max(64, 4 * max_order) quadrature nodes.
  explicit HermiteBasis(int max_order);
  /// Requires quadrature_order >= 2 * max_order + 2.
  HermiteBasis(int max_order, int quadrature_order);

  int max_order() const noexcept { return max_order_; }
  int quadrature_order() const noexcept { return static_cast<int>(rule_.size()); }
  const QuadratureRule& rule() const noexcept { return rule_; }

  /// phi_0..phi_{max_order} at x.
  std::vector<double> evaluate(double x) const;

 private:
  int max_order_;
  QuadratureRule rule_;
};

/// E[phi_k(Z)] for Z ~ N(mean, variance), k = 0..max_order, by Gauss-Hermite
/// quadrature on the rule's nodes. variance == 0 gives phi_k(mean).
std::vector<double> gaussian_expected_phi(double mean, double variance, int max_order,
                                          const QuadratureRule& rule);

/// Numerical sup-norm and Lipschitz estimates of phi_k on a grid.
struct PhiBound {
  int k = 0;
  double sup = 0.0;        // max over grid of |phi_k|
  double lipschitz = 0.0;  // max over grid of |phi_k'|
};

/// n equally spaced points on [lo, hi] (both ends included).
std::vector<double> uniform_grid(double lo, double hi, std::size_t n);

/// Default diagnostics grid: 4001 points on [-10, 10].
std::vector<double> default_bound_grid();

/// Bounds for k = 0..max_order. Derivatives use the exact identity
///   phi_k' = sqrt(k/2) phi_{k-1} - sqrt((k+1)/2) phi_{k+1}.
std::vector<PhiBound> phi_bounds(int max_order, std::span<const double> grid);
std::vector<PhiBound> phi_bounds(int max_order);

}  // namespace mvsde
