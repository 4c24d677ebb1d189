#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mvsde/basis.hpp"

namespace {

using namespace mvsde;

// Explicit sum H_n(x) = n! sum_m (-1)^m (2x)^(n-2m) / (m! (n-2m)!), normalised
// by sqrt(2^n n! sqrt(pi)); long double keeps it accurate for small n.
long double monomial_hermite_normalized(int n, long double x) {
  long double sum = 0.0L;
  for (int m = 0; 2 * m <= n; ++m) {
    const long double term = std::pow(2.0L * x, n - 2 * m) / (std::tgamma(m + 1.0L) * std::tgamma(n - 2 * m + 1.0L));
    sum += (m % 2 ? -term : term);
  }
  const long double hn = std::tgamma(n + 1.0L) * sum;
  return hn / std::sqrt(std::pow(2.0L, n) * std::tgamma(n + 1.0L) * std::sqrt(std::numbers::pi_v<long double>));
}

// Composite trapezoid on a wide fine grid; the integrands decay like exp(-x^2).
template <class F>
double brute_integral(F f, double lo = -20.0, double hi = 20.0, int n = 40000) {
  const double dx = (hi - lo) / n;
  double s = 0.5 * (f(lo) + f(hi));
  for (int i = 1; i < n; ++i) s += f(lo + i * dx);
  return s * dx;
}

TEST(Hermite, MatchesExplicitMonomialSum) {
  for (int n = 0; n <= 12; ++n) {
    for (double x : {-2.5, -1.0, -0.3, 0.0, 0.7, 1.9, 3.1}) {
      const double expected = static_cast<double>(monomial_hermite_normalized(n, x));
      EXPECT_NEAR(hermite_normalized(n, x), expected, 1e-11 * std::max(1.0, std::abs(expected))) << n << " " << x;
    }
  }
}

TEST(Hermite, PhiCarriesGaussianFactor) {
  for (int k = 0; k <= 10; ++k) {
    for (double x : {-1.5, 0.0, 0.4, 2.2}) {
      EXPECT_NEAR(phi(k, x), hermite_normalized(k, x) * std::exp(-0.5 * x * x), 1e-14);
    }
  }
}

TEST(Hermite, PhiAllAgreesWithSingleEvaluations) {
  std::vector<double> out(25);
  for (double x : {-4.0, -0.2, 0.0, 1.3, 6.0}) {
    phi_all(x, out);
    for (int k = 0; k < 25; ++k) EXPECT_NEAR(out[static_cast<std::size_t>(k)], phi(k, x), 1e-13);
  }
}

TEST(Hermite, PhiAllUnderflowsToZeroFarOut) {
  std::vector<double> out(40);
  phi_all(1e4, out);
  for (double v : out) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_EQ(v, 0.0);
  }
}

TEST(Hermite, OrthonormalUnderDirectIntegration) {
  for (int j = 0; j <= 8; ++j) {
    for (int l = 0; l <= 8; ++l) {
      const double ip = brute_integral([&](double x) { return phi(j, x) * phi(l, x); });
      EXPECT_NEAR(ip, j == l ? 1.0 : 0.0, 1e-9) << j << "," << l;
    }
  }
}

TEST(Hermite, UniformBoundHolds) {
  for (const auto& b : phi_bounds(30)) {
    EXPECT_LE(b.sup, kHermiteFunctionBound) << b.k;
    EXPECT_GT(b.lipschitz, 0.0);
  }
}

TEST(Quadrature, TwoPointRule) {
  const auto r = gauss_hermite(2);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(r.nodes[0], -1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(r.nodes[1], 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(r.weights[0], std::sqrt(std::numbers::pi) / 2.0, 1e-15);
  EXPECT_NEAR(r.weights[1], std::sqrt(std::numbers::pi) / 2.0, 1e-15);
}

TEST(Quadrature, ThreePointRule) {
  const auto r = gauss_hermite(3);
  ASSERT_EQ(r.size(), 3u);
  const double sp = std::sqrt(std::numbers::pi);
  EXPECT_NEAR(r.nodes[0], -std::sqrt(1.5), 1e-15);
  EXPECT_NEAR(r.nodes[1], 0.0, 1e-15);
  EXPECT_NEAR(r.nodes[2], std::sqrt(1.5), 1e-15);
  EXPECT_NEAR(r.weights[0], sp / 6.0, 1e-15);
  EXPECT_NEAR(r.weights[1], 2.0 * sp / 3.0, 1e-15);
  EXPECT_NEAR(r.weights[2], sp / 6.0, 1e-15);
}

TEST(Quadrature, ExactForEvenMonomials) {
  // int x^(2m) exp(-x^2) dx = Gamma(m + 1/2).
  const int n = 20;
  const auto r = gauss_hermite(n);
  for (int m = 0; 2 * m <= 2 * n - 1; ++m) {
    double s = 0.0;
    for (std::size_t q = 0; q < r.size(); ++q) s += r.weights[q] * std::pow(r.nodes[q], 2 * m);
    const double exact = std::tgamma(m + 0.5);
    EXPECT_NEAR(s, exact, 1e-12 * exact) << m;
  }
}

TEST(Quadrature, ScaledWeightsMatchWeights) {
  const auto r = gauss_hermite(30);
  for (std::size_t q = 0; q < r.size(); ++q) {
    EXPECT_NEAR(r.scaled_weights[q] * std::exp(-r.nodes[q] * r.nodes[q]), r.weights[q], 1e-14 * r.scaled_weights[q]);
  }
}

TEST(Quadrature, RejectsBadOrder) { EXPECT_THROW(gauss_hermite(0), std::invalid_argument); }

TEST(Basis, DiscreteOrthonormality) {
  const HermiteBasis basis(20);
  const auto& r = basis.rule();
  std::vector<double> v(21);
  std::vector<std::vector<double>> table;
  for (double x : r.nodes) {
    phi_all(x, v);
    table.push_back(v);
  }
  for (int j = 0; j <= 20; ++j) {
    for (int l = 0; l <= 20; ++l) {
      double s = 0.0;
      for (std::size_t q = 0; q < r.size(); ++q) {
        s += r.scaled_weights[q] * table[q][static_cast<std::size_t>(j)] * table[q][static_cast<std::size_t>(l)];
      }
      EXPECT_NEAR(s, j == l ? 1.0 : 0.0, 1e-12);
    }
  }
}

TEST(Basis, RequiresEnoughNodes) {
  EXPECT_THROW(HermiteBasis(10, 21), std::invalid_argument);
  EXPECT_NO_THROW(HermiteBasis(10, 22));
}

TEST(Basis, GaussianExpectationAgainstDirectIntegration) {
  const HermiteBasis basis(12);
  for (auto [m, v] : {std::pair{0.0, 1.0}, std::pair{0.5, 1.0}, std::pair{1.2, 0.3}}) {
    const auto g = gaussian_expected_phi(m, v, 12, basis.rule());
    for (int k = 0; k <= 12; ++k) {
      const double oracle = brute_integral([&](double x) {
        return phi(k, x) * std::exp(-(x - m) * (x - m) / (2 * v)) / std::sqrt(2 * std::numbers::pi * v);
      });
      EXPECT_NEAR(g[static_cast<std::size_t>(k)], oracle, 1e-10) << k;
    }
  }
}

TEST(Basis, GaussianExpectationZeroVarianceIsPointEvaluation) {
  const HermiteBasis basis(8);
  const auto g = gaussian_expected_phi(0.5, 0.0, 8, basis.rule());
  for (int k = 0; k <= 8; ++k) EXPECT_DOUBLE_EQ(g[static_cast<std::size_t>(k)], phi(k, 0.5));
}

}  // namespace
