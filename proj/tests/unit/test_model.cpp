#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "mvsde/basis.hpp"
#include "mvsde/error.hpp"
#include "mvsde/model.hpp"

namespace {

using namespace mvsde;

double brute_alpha(int n, double y) {
  const double lo = y - 40.0, hi = y + 40.0;
  const int steps = 80000;
  const double dx = (hi - lo) / steps;
  double s = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double u = lo + i * dx;
    const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
    s += w * std::exp(-0.5 * (y - u) * (y - u)) * phi(n, u);
  }
  return s * dx;
}

TEST(ClosedForm, MatchesDirectIntegration) {
  for (int n = 0; n <= 12; ++n) {
    for (double y : {-2.7, -1.0, 0.0, 0.3, 1.6, 3.0}) {
      EXPECT_NEAR(gaussian_alpha_closed_form(n, y), brute_alpha(n, y), 1e-9) << n << " " << y;
    }
  }
}

TEST(ClosedForm, Parity) {
  for (int n = 0; n <= 20; ++n) {
    for (double y : {0.4, 1.1, 2.9}) {
      const double s = n % 2 ? -1.0 : 1.0;
      EXPECT_DOUBLE_EQ(gaussian_alpha_closed_form(n, -y), s * gaussian_alpha_closed_form(n, y));
    }
  }
}

TEST(ClosedForm, AgreesWithQuadratureProjection) {
  const int K = 20;
  const auto model = gaussian_interaction_model(0.1, PointMass{0.5}, 1.0);
  const auto quad = project_kernel(model, HermiteBasis(K), K);
  const auto closed = gaussian_projected_model(0.1, PointMass{0.5}, 1.0, K);
  EXPECT_EQ(closed.provenance, Provenance::closed_form);
  EXPECT_EQ(quad.provenance, Provenance::quadrature);
  for (int i = -30; i <= 30; ++i) {
    const double y = 0.1 * i;
    const auto a = quad.alpha_values(y);
    const auto b = closed.alpha_values(y);
    for (int n = 0; n <= K; ++n) {
      const auto k = static_cast<std::size_t>(n);
      EXPECT_NEAR(a[k], b[k], 1e-6);
      EXPECT_NEAR(b[k], gaussian_alpha_closed_form(n, y), 1e-13);
    }
  }
}

TEST(Projected, DriftIsLinearInGamma) {
  const int K = 6;
  const auto pm = gaussian_projected_model(0.2, PointMass{0.0}, 1.0, K);
  std::vector<double> scratch(K + 1);
  const double x = 0.7;
  const auto alpha = pm.alpha_values(x);
  std::vector<double> g1(K + 1), g2(K + 1), mix(K + 1);
  for (int k = 0; k <= K; ++k) {
    g1[static_cast<std::size_t>(k)] = std::cos(k);
    g2[static_cast<std::size_t>(k)] = 1.0 / (k + 1.0);
    mix[static_cast<std::size_t>(k)] = 2.0 * g1[static_cast<std::size_t>(k)] - 0.5 * g2[static_cast<std::size_t>(k)];
  }
  const double d1 = pm.drift(x, g1, scratch);
  const double d2 = pm.drift(x, g2, scratch);
  EXPECT_NEAR(pm.drift(x, mix, scratch), 2.0 * d1 - 0.5 * d2, 1e-12);
  for (int k = 0; k <= K; ++k) {
    std::vector<double> e(K + 1, 0.0);
    e[static_cast<std::size_t>(k)] = 1.0;
    EXPECT_DOUBLE_EQ(pm.drift(x, e, scratch), alpha[static_cast<std::size_t>(k)]);
  }
  EXPECT_DOUBLE_EQ(pm.diffusion(x, g1, scratch), 0.2);
  EXPECT_EQ(pm.drift_cost(), K + 1);
}

TEST(Projected, RecoversKernelAverageForGaussianLaw) {
  // <b(x,.), N(m,v)> = exp(-(x-m)^2 / (2(1+v))) / sqrt(1+v) for the unit Gaussian kernel.
  const int K = 40;
  const auto pm = gaussian_projected_model(0.1, PointMass{0.0}, 1.0, K);
  const HermiteBasis basis(K);
  const double m = 0.3, v = 0.8;
  const auto gamma = gaussian_expected_phi(m, v, K, basis.rule());
  std::vector<double> scratch(K + 1);
  for (double x : {-1.0, 0.0, 0.5, 1.5}) {
    const double exact = std::exp(-(x - m) * (x - m) / (2.0 * (1.0 + v))) / std::sqrt(1.0 + v);
    EXPECT_NEAR(pm.drift(x, gamma, scratch), exact, 1e-6) << x;
  }
}

TEST(Projected, RejectsOrderBeyondBasis) {
  const auto model = gaussian_interaction_model(0.1, PointMass{}, 1.0);
  EXPECT_THROW(project_kernel(model, HermiteBasis(5), 6), std::invalid_argument);
}

TEST(Projected, FlagsNonFiniteKernel) {
  KernelModel m = gaussian_interaction_model(0.1, PointMass{}, 1.0);
  m.drift_kernel = [](double, double y) { return y > 3.0 ? std::numeric_limits<double>::quiet_NaN() : 1.0; };
  const auto pm = project_kernel(m, HermiteBasis(4), 4);
  std::vector<double> out(5);
  EXPECT_THROW(pm.alpha(0.0, out), NumericalError);
  EXPECT_THROW(m.validate(), std::invalid_argument);
}

TEST(Model, InitialGammaOfPointMass) {
  const HermiteBasis basis(6);
  const auto g = initial_gamma(PointMass{0.5}, 6, basis.rule());
  for (int k = 0; k <= 6; ++k) EXPECT_DOUBLE_EQ(g[static_cast<std::size_t>(k)], phi(k, 0.5));
}

TEST(Model, GaussianKernelShape) {
  const auto m = gaussian_interaction_model(0.3, PointMass{}, 2.0, 2.0, 1.5);
  EXPECT_DOUBLE_EQ(m.drift_kernel(1.0, 1.0), 1.5);
  EXPECT_NEAR(m.drift_kernel(0.0, 2.0), 1.5 * std::exp(-0.5), 1e-15);
  EXPECT_DOUBLE_EQ(m.diffusion_state(4.0), 0.3);
  EXPECT_DOUBLE_EQ(m.horizon, 2.0);
}

TEST(DecayFit, ExactGeometricSequence) {
  std::vector<double> g;
  for (int k = 0; k <= 15; ++k) g.push_back((k % 2 ? -2.0 : 2.0) * std::exp(-0.5 * k));
  const auto f = fit_gamma_decay(g);
  EXPECT_NEAR(f.gamma_circ, 0.5, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_NEAR(f.raw_gamma_circ, 0.5, 1e-12);
  EXPECT_EQ(f.resolved, 16);
}

TEST(DecayFit, StopsAtNoiseFloor) {
  std::vector<double> g, se;
  for (int k = 0; k <= 15; ++k) {
    g.push_back(std::exp(-0.7 * k));
    se.push_back(1e-3);
  }
  const auto f = fit_gamma_decay(g, se);
  // |g_k| > 3e-3 holds up to k = 8.
  EXPECT_EQ(f.resolved, 9);
  EXPECT_NEAR(f.gamma_circ, 0.7, 1e-12);
}

TEST(Assumptions, GrowthDiagnosticsFinite) {
  const auto pm = gaussian_projected_model(0.1, PointMass{0.5}, 1.0, 10);
  const auto rep = assumption_diagnostics(pm, uniform_grid(-6.0, 6.0, 241));
  ASSERT_EQ(rep.alpha_growth.size(), 11u);
  for (double a : rep.alpha_growth) EXPECT_TRUE(std::isfinite(a));
  EXPECT_TRUE(std::isfinite(rep.alpha_growth_sum));
  EXPECT_FALSE(rep.decay.has_value());
}

}  // namespace
