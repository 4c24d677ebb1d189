#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mvsde/basis.hpp"
#include "mvsde/model.hpp"
#include "mvsde/particle.hpp"

namespace {

using namespace mvsde;

TEST(Chaos, TwoParticleStepByHand) {
  const auto model = gaussian_interaction_model(0.5, PointMass{}, 1.0);
  ParticleEnsemble ens{{0.0, 1.0}, 0, -1, 0};
  const std::vector<double> dW{0.1, -0.2};
  CostLedger cost;
  const auto next = chaos_step(ens, model, dW, 0.1, cost);
  const double avg = 0.5 * (1.0 + std::exp(-0.5));
  EXPECT_NEAR(next.states[0], 0.0 + 0.1 * avg + 0.5 * 0.1, 1e-15);
  EXPECT_NEAR(next.states[1], 1.0 + 0.1 * avg - 0.5 * 0.2, 1e-15);
  EXPECT_EQ(next.time_index, 1);
  EXPECT_EQ(cost.drift_evals(), 4u);
}

TEST(Chaos, MeasureDependentDiffusionAveragesKernel) {
  KernelModel m = gaussian_interaction_model(0.0, PointMass{}, 1.0);
  m.diffusion_state = nullptr;
  m.diffusion_kernel = [](double x, double y) { return x + y; };
  ParticleEnsemble ens{{1.0, 3.0}, 0, -1, 0};
  const std::vector<double> dW{1.0, 0.0};
  CostLedger cost;
  const auto next = chaos_step(ens, m, dW, 0.0, cost);
  // particle 0: mean(1+1, 1+3) = 3.
  EXPECT_DOUBLE_EQ(next.states[0], 4.0);
  EXPECT_DOUBLE_EQ(next.states[1], 3.0);
}

TEST(Ppm, StepByHand) {
  const int K = 3;
  const auto pm = gaussian_projected_model(0.2, PointMass{}, 1.0, K);
  ParticleEnsemble ens{{-0.5, 0.25, 1.0}, 0, -1, 0};
  const std::vector<double> dW{0.05, 0.0, -0.1};
  CostLedger cost;
  const auto [next, snap] = ppm_step(ens, pm, dW, 0.01, cost);
  std::vector<double> gamma(K + 1, 0.0);
  for (double x : ens.states) {
    for (int k = 0; k <= K; ++k) gamma[static_cast<std::size_t>(k)] += phi(k, x) / 3.0;
  }
  for (int k = 0; k <= K; ++k) EXPECT_NEAR(snap.values[static_cast<std::size_t>(k)], gamma[static_cast<std::size_t>(k)], 1e-15);
  for (std::size_t i = 0; i < 3; ++i) {
    double drift = 0.0;
    for (int k = 0; k <= K; ++k) drift += gaussian_alpha_closed_form(k, ens.states[i]) * gamma[static_cast<std::size_t>(k)];
    EXPECT_NEAR(next.states[i], ens.states[i] + 0.01 * drift + 0.2 * dW[i], 1e-14);
  }
  EXPECT_EQ(cost.drift_evals(), 12u);
  EXPECT_EQ(cost.basis_evals(), 12u);
}

TEST(Gamma, EmpiricalIndependentOfThreads) {
  std::vector<double> x(20000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.37 * static_cast<double>(i)) * 3.0;
  const auto ref = empirical_gamma(x, 12, 1).values;
  for (unsigned t : {2u, 3u, 7u}) EXPECT_EQ(empirical_gamma(x, 12, t).values, ref);
  const auto est = empirical_gamma_with_se(x, 12, 4);
  EXPECT_EQ(est.mean, ref);
  for (double s : est.se) EXPECT_GT(s, 0.0);
}

TEST(Simulate, DeterministicOdeWithoutNoise) {
  const auto model = gaussian_interaction_model(0.0, PointMass{0.5}, 1.0);
  const auto pm = gaussian_projected_model(0.0, PointMass{0.5}, 1.0, 4);
  SimulationConfig cfg;
  cfg.particles = 1;
  cfg.seed = 3;
  const auto res = simulate(Engine::chaos, model, pm, cfg);
  // A single particle feels Q(0) = 1 at every step.
  EXPECT_NEAR(res.terminal.states[0], 1.5, 1e-12);
  EXPECT_NEAR(res.path_mean[50], 1.0, 1e-12);
  EXPECT_EQ(res.path_variance.back(), 0.0);
  EXPECT_EQ(res.path_mean.size(), 101u);
}

TEST(Simulate, EnginesShareIncrements) {
  // With no interaction both engines reduce to x0 + sigma W_t on the same path.
  KernelModel m = gaussian_interaction_model(0.7, GaussianLaw{0.0, 1.0}, 1.0, 1.0, 0.0);
  const auto pm = project_kernel(m, HermiteBasis(3), 3);
  SimulationConfig cfg;
  cfg.grid = TimeGrid::dyadic(1.0, 4);
  cfg.particles = 300;
  cfg.seed = 17;
  const auto a = simulate(Engine::chaos, m, pm, cfg);
  const auto b = simulate(Engine::ppm, m, pm, cfg);
  ASSERT_EQ(a.terminal.states.size(), b.terminal.states.size());
  for (std::size_t i = 0; i < a.terminal.states.size(); ++i) EXPECT_DOUBLE_EQ(a.terminal.states[i], b.terminal.states[i]);
}

TEST(Simulate, IndependentOfThreads) {
  const auto model = gaussian_interaction_model(0.1, PointMass{0.5}, 1.0);
  const auto pm = gaussian_projected_model(0.1, PointMass{0.5}, 1.0, 8);
  SimulationConfig cfg;
  cfg.particles = 1000;
  cfg.seed = 5;
  cfg.threads = 1;
  const auto ref = simulate(Engine::ppm, model, pm, cfg);
  cfg.threads = 4;
  const auto par = simulate(Engine::ppm, model, pm, cfg);
  EXPECT_EQ(ref.terminal.states, par.terminal.states);
  EXPECT_EQ(ref.path_mean, par.path_mean);
}

TEST(Simulate, CostLedgerCounts) {
  const auto model = gaussian_interaction_model(0.1, PointMass{0.5}, 1.0);
  const auto pm = gaussian_projected_model(0.1, PointMass{0.5}, 1.0, 5);
  SimulationConfig cfg;
  cfg.grid = TimeGrid::dyadic(1.0, 3);
  cfg.particles = 40;
  cfg.seed = 1;
  const auto chaos = simulate(Engine::chaos, model, pm, cfg);
  EXPECT_EQ(chaos.cost.drift_evals(), 8u * 40u * 40u);
  const auto ppm = simulate(Engine::ppm, model, pm, cfg);
  EXPECT_EQ(ppm.cost.drift_evals(), 8u * 6u * 40u);
  EXPECT_EQ(ppm.cost.rng_draws(), chaos.cost.rng_draws());
}

TEST(Simulate, GaussianInitialLawMoments) {
  KernelModel m = gaussian_interaction_model(0.0, GaussianLaw{1.0, 4.0}, 1.0, 1.0, 0.0);
  const auto pm = project_kernel(m, HermiteBasis(2), 2);
  SimulationConfig cfg;
  cfg.grid = TimeGrid::dyadic(1.0, 0);
  cfg.particles = 200000;
  cfg.seed = 8;
  const auto res = simulate(Engine::ppm, m, pm, cfg);
  EXPECT_NEAR(res.path_mean[0], 1.0, 5.0 * 2.0 / std::sqrt(2e5));
  EXPECT_NEAR(res.path_variance[0], 4.0, 0.05);
}

TEST(StrongError, DecreasesWithTruncation) {
  const auto model = gaussian_interaction_model(0.1, PointMass{0.5}, 1.0);
  SimulationConfig cfg;
  cfg.particles = 200;
  cfg.seed = 2;
  const std::vector<int> Ks{1, 4, 8, 12};
  const auto sweep = strong_error_sweep(
      model, [](int K) { return gaussian_projected_model(0.1, PointMass{0.5}, 1.0, K); }, Ks, cfg);
  ASSERT_EQ(sweep.rows.size(), 4u);
  for (std::size_t i = 1; i < sweep.rows.size(); ++i) EXPECT_LT(sweep.rows[i].error, sweep.rows[i - 1].error);
  ASSERT_TRUE(sweep.fit.has_value());
  EXPECT_LT(sweep.fit->slope, 0.0);
  for (const auto& r : sweep.rows) EXPECT_GT(r.cost_gain, 0.0);
  const auto single = strong_error(model, gaussian_projected_model(0.1, PointMass{0.5}, 1.0, 4), cfg);
  EXPECT_DOUBLE_EQ(single.error, sweep.rows[1].error);
}

}  // namespace
