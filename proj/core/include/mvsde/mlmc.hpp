#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mvsde/cost.hpp"
#include "mvsde/gamma_table.hpp"
#include "mvsde/model.hpp"
#include "mvsde/stats.hpp"

namespace mvsde {

/// Quantity averaged over paths: every basis function phi_0..phi_K,
/// the state itself (P = identity), or phi_0 alone.
enum class Payoff { basis, identity, phi0 };

int payoff_dimension(Payoff payoff, int K) noexcept;

/// Fine (level l) and coarse (level l-1) paths of the Picard-frozen SDE,
/// row-major per particle. Both members share one Brownian path.
struct CoupledPaths {
  int level = 0;
  std::size_t particles = 0;
  int fine_nodes = 0;
  int coarse_nodes = 0;  // zero at level 0
  std::vector<double> fine;
  std::vector<double> coarse;
  std::vector<double> fine_increments;
  std::vector<double> coarse_increments;
};

/// Records full coupled paths; meant for inspection and tests (memory N * 2^l).
CoupledPaths coupled_pair_simulate(int level, const GammaTable& frozen, const ProjectedModel& pm, std::size_t N,
                                   std::uint64_t seed, std::uint32_t picard_step = 1);

struct LevelStatistics {
  int level = 0;
  std::size_t samples = 0;
  std::vector<double> mean;           // per payoff component, terminal time: E[P_f - P_c]
  std::vector<double> second_moment;  // E[(P_f - P_c)^2]
  std::vector<double> variance;       // unbiased sample variance of P_f - P_c
  CostLedger cost;
};

/// Multilevel estimate of E[P(Y_t)] on every node of a dyadic target grid.
struct MultilevelEstimate {
  TimeGrid grid = TimeGrid::dyadic(1.0, 0);
  int components = 0;
  std::vector<double> values;  // row-major components x nodes
  std::vector<LevelStatistics> levels;
  std::vector<double> terminal_se;  // sqrt(sum_l V_l / N_l) per component
  CostLedger cost;

  double value(int c, int j) const { return values[static_cast<std::size_t>(c) * (grid.num_steps() + 1) + j]; }
};

struct MultilevelRequest {
  std::vector<std::size_t> samples;  // N_l for l = 0..L
  int target_level = 0;
  Payoff payoff = Payoff::basis;
  std::uint64_t seed = 0;
  std::uint32_t picard_step = 1;
  unsigned threads = 1;
};

/// sum_l (1/N_l) sum_i [P(Y^{i,l}_t) - P(Y^{i,l-1}_t)] with the frozen table
/// driving the coefficients. Values at target nodes that fall between path
/// nodes use linear interpolation in time.
MultilevelEstimate multilevel_estimate(const GammaTable& frozen, const ProjectedModel& pm,
                                       const MultilevelRequest& req);

/// Single-level Monte Carlo at `level` with the same streams as level `level`
/// of multilevel_estimate.
MultilevelEstimate plain_mc_estimate(const GammaTable& frozen, const ProjectedModel& pm, int level, std::size_t N,
                                     const MultilevelRequest& req);

struct LevelAllocation {
  int L = 0;
  std::vector<std::size_t> N_per_level;
  int picard_steps = 1;
  int K = 1;
};

struct AllocationOptions {
  double gamma_circ = 1.2;  // decay rate behind K = ceil(log(1/eps) / gamma_circ)
  int K_max = 20;
  double c_M = 1.0;
  double c_h = 1.0;
  double horizon = 1.0;
  std::size_t min_samples = 1;
  int L_override = -1;  // use this L instead of the eps rule when >= 0
};

/// Level count, truncation, Picard steps and per-level samples for MSE eps^2.
/// Pilot variances beyond the supplied levels are extrapolated with a
/// factor 1/4 per level. Throws std::invalid_argument for eps >= 1/e.
LevelAllocation allocate_levels(double eps, std::span<const double> pilot_variances,
                                const AllocationOptions& opts = {});

struct PilotResult {
  std::vector<double> variances;
  CostLedger cost;
};

/// Level-difference variances from n_pilot pairs per level. For the basis
/// payoff the variances of all K+1 components are summed, which is the
/// variance of the L2 density error by Parseval.
PilotResult pilot_variances(const GammaTable& frozen, const ProjectedModel& pm, int L, std::size_t n_pilot,
                            std::uint64_t seed, unsigned threads = 1, Payoff payoff = Payoff::identity);

struct MlmcGammaResult {
  GammaTable table;
  std::vector<double> terminal_se;
  std::vector<LevelStatistics> levels;
  CostLedger cost;
};

/// Next Picard table on the target grid of level table_level.
MlmcGammaResult mlmc_gamma_estimate(const GammaTable& frozen, const LevelAllocation& alloc, const ProjectedModel& pm,
                                    int table_level, std::uint64_t seed, std::uint32_t picard_step,
                                    unsigned threads = 1);

enum class PicardInit { static_gaussian, initial_law };

struct PicardConfig {
  int picard_steps = 4;                     // M
  int table_level = 5;                      // L_0
  std::vector<std::size_t> samples;         // N_l for the table steps
  std::vector<std::size_t> final_samples;   // N_l for the final step; empty = samples
  PicardInit init = PicardInit::static_gaussian;
  double init_mean = 0.5;
  double init_variance = 1.0;
  Payoff final_payoff = Payoff::identity;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct PicardResult {
  std::vector<GammaTable> tables;                     // D^0 .. D^{M-1}
  std::vector<std::vector<double>> table_terminal_se;
  std::vector<double> payoff_path;                    // M_t(P) on the final grid
  TimeGrid payoff_grid = TimeGrid::dyadic(1.0, 0);
  double estimate = 0.0;
  double standard_error = 0.0;
  std::vector<CostLedger> step_costs;                 // entry m-1 is Picard step m
  CostLedger cost;
};

/// Iterative MLMC over Picard steps. D^0 is the static initial table; step
/// m = 1..M-1 estimates D^m conditioned on D^{m-1}; the final step estimates
/// P on the grid of level final_samples.size()-1 conditioned on D^{M-1}.
/// Throws NumericalError when a table entry exceeds the basis bound by 1e-3.
PicardResult picard_run(const PicardConfig& cfg, const ProjectedModel& pm);

struct PicardTables {
  std::vector<GammaTable> tables;  // D^0 .. D^{count-1}
  std::vector<std::vector<double>> terminal_se;
  std::vector<CostLedger> step_costs;  // one per estimated table (D^1 onwards)
};

/// The first `count` tables of the Picard iteration, with the same streams
/// and stability check as picard_run.
PicardTables picard_tables(const PicardConfig& cfg, const ProjectedModel& pm, int count);

/// Static D^0 per cfg.init on the table grid.
GammaTable initial_table(const PicardConfig& cfg, const ProjectedModel& pm);

struct RateRow {
  int level = 0;
  double a = 0.0;  // |mean of phi_0 differences|
  double b = 0.0;  // mean of squared phi_0 differences
};

struct RateTable {
  int picard_step = 0;
  std::vector<RateRow> rows;
  double alpha_hat = 0.0;  // -slope of log2 a vs level
  double beta_hat = 0.0;   // -slope of log2 b vs level
};

/// Weak and strong level-difference rates of the SDE frozen at `frozen`.
/// Refuses fewer than three levels.
RateTable rate_test(const GammaTable& frozen, const ProjectedModel& pm, std::span<const int> levels, std::size_t N,
                    std::uint64_t seed, std::uint32_t picard_step, unsigned threads = 1);

enum class Method { ppm, mlmc, chaos };
std::string method_name(Method m);

struct ComplexityOptions {
  AllocationOptions alloc;
  double benchmark = 1.4951;
  double payoff_variance = 0.0;  // Var[X_T]; <= 0 estimates it with a pilot PPM run
  std::size_t pilot_samples = 1000;
  unsigned threads = 1;
};

struct ComplexityRow {
  Method method = Method::ppm;
  double epsilon = 0.0;
  double rng_draws = 0.0;    // mean over seeds
  double drift_evals = 0.0;  // mean over seeds
  double mse = 0.0;          // mean squared deviation from the benchmark over seeds
  int K = 0;
  int L = 0;
  int picard_steps = 0;
  std::size_t particles = 0;  // N for particle methods, N_0 for MLMC (first seed)

  double cost() const noexcept { return rng_draws + drift_evals; }
};

/// Ledger cost and replicated MSE of each method at each eps.
/// projector(K) must return the projected model for truncation K.
std::vector<ComplexityRow> complexity_sweep(std::span<const Method> methods, std::span<const double> eps_list,
                                            std::span<const std::uint64_t> seeds, const KernelModel& model,
                                            const std::function<ProjectedModel(int)>& projector,
                                            const ComplexityOptions& opts = {});

/// Slope of log cost vs log(1/eps) for one method.
LinearFit complexity_slope(std::span<const ComplexityRow> rows, Method method);

}  // namespace mvsde
