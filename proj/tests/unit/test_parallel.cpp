#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mvsde/cost.hpp"
#include "mvsde/gamma_table.hpp"
#include "mvsde/parallel.hpp"
#include "mvsde/stats.hpp"
#include "mvsde/time_grid.hpp"

namespace {

using namespace mvsde;

TEST(Parallel, VisitsEveryIndexOnce) {
  const std::size_t n = 3 * kBlockSize + 17;
  for (unsigned threads : {1u, 2u, 5u}) {
    std::vector<std::atomic<int>> hits(n);
    parallel_for_blocks(n, threads, [&](std::size_t b, std::size_t e, std::size_t) {
      for (std::size_t i = b; i < e; ++i) hits[i].fetch_add(1);
    });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(Parallel, BlockedSumIndependentOfThreads) {
  const std::size_t n = 100003;
  auto fn = [](std::size_t b, std::size_t e, std::span<double> acc) {
    for (std::size_t i = b; i < e; ++i) {
      acc[0] += std::sin(static_cast<double>(i)) * 1e-3;
      acc[1] += 1.0 / (1.0 + static_cast<double>(i));
    }
  };
  const auto ref = blocked_sum(n, 2, 1, fn);
  for (unsigned threads : {2u, 3u, 8u}) EXPECT_EQ(blocked_sum(n, 2, threads, fn), ref);
  double harmonic = 0.0;
  for (std::size_t i = 0; i < n; ++i) harmonic += 1.0 / (1.0 + static_cast<double>(i));
  EXPECT_NEAR(ref[1], harmonic, 1e-10);
}

TEST(Parallel, PropagatesExceptions) {
  EXPECT_THROW(parallel_for_blocks(10 * kBlockSize, 4,
                                   [](std::size_t b, std::size_t, std::size_t) {
                                     if (b >= 5 * kBlockSize) throw std::runtime_error("boom");
                                   }),
               std::runtime_error);
}

TEST(Parallel, PairwiseCombineSmall) {
  std::vector<std::vector<double>> parts{{1.0}, {2.0}, {3.0}};
  pairwise_combine(parts);
  EXPECT_EQ(parts[0][0], 6.0);
}

TEST(Stats, LinearFitExactLine) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{1.5, 3.5, 5.5, 7.5};
  const auto f = linear_fit(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, -0.5, 1e-14);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-14);
}

TEST(Stats, LinearFitHandComputed) {
  // x = 0,1,2 ; y = 0,2,1: slope 0.5, intercept 0.5, R^2 = 0.25.
  const auto f = linear_fit(std::vector<double>{0, 1, 2}, std::vector<double>{0, 2, 1});
  EXPECT_NEAR(f.slope, 0.5, 1e-14);
  EXPECT_NEAR(f.intercept, 0.5, 1e-14);
  EXPECT_NEAR(f.r_squared, 0.25, 1e-14);
}

TEST(Stats, MeanAndVariance) {
  const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(mean(v), 5.0);
  EXPECT_DOUBLE_EQ(sample_variance(v), 32.0 / 7.0);
  EXPECT_EQ(sample_variance(std::vector<double>{3.0}), 0.0);
}

TEST(Cost, TotalIsDrawsPlusDriftEvaluations) {
  CostLedger a;
  a.add_rng_draws(3);
  a.add_drift_evals(10);
  a.add_basis_evals(100);
  CostLedger b;
  b.add_rng_draws(1);
  b += a;
  EXPECT_EQ(b.rng_draws(), 4u);
  EXPECT_EQ(b.basis_evals(), 100u);
  EXPECT_EQ(b.total(), 14u);
}

TEST(TimeGrid, DyadicAndUniform) {
  const auto g = TimeGrid::dyadic(2.0, 3);
  EXPECT_EQ(g.num_steps(), 8);
  EXPECT_DOUBLE_EQ(g.step(), 0.25);
  EXPECT_EQ(g.time(8), 2.0);
  EXPECT_EQ(TimeGrid::from_step(1.0, 0.01).num_steps(), 100);
  EXPECT_FALSE(TimeGrid::from_step(1.0, 0.01).is_dyadic());
  EXPECT_EQ(TimeGrid::uniform(1.0, 16).level(), 4);
  EXPECT_THROW(TimeGrid::from_step(1.0, 0.3), std::invalid_argument);
  EXPECT_THROW(TimeGrid::dyadic(1.0, -1), std::invalid_argument);
}

TEST(GammaTable, InterpolationExactAtNodesAndLinearBetween) {
  GammaTable t(1, TimeGrid::dyadic(1.0, 1));
  t.at(0, 0) = 1.0;
  t.at(0, 1) = 3.0;
  t.at(0, 2) = 2.0;
  t.at(1, 0) = -1.0;
  t.at(1, 1) = 0.0;
  t.at(1, 2) = 4.0;
  EXPECT_EQ(interpolate_gamma(t, 0.5), (std::vector<double>{3.0, 0.0}));
  const auto mid = interpolate_gamma(t, 0.75);
  EXPECT_DOUBLE_EQ(mid[0], 2.5);
  EXPECT_DOUBLE_EQ(mid[1], 2.0);
  EXPECT_EQ(interpolate_gamma(t, 1.0), (std::vector<double>{2.0, 4.0}));
  EXPECT_THROW(interpolate_gamma(t, 1.5), std::invalid_argument);
  EXPECT_DOUBLE_EQ(t.max_abs(), 4.0);
}

}  // namespace
