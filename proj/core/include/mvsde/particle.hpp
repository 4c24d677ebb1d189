#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mvsde/cost.hpp"
#include "mvsde/gamma_table.hpp"
#include "mvsde/model.hpp"
#include "mvsde/stats.hpp"
#include "mvsde/time_grid.hpp"

namespace mvsde {

struct ParticleEnsemble {
  std::vector<double> states;
  int time_index = 0;
  int level = -1;
  /// Stream index of states[0]; particle i draws from stream first_particle + i.
  std::uint64_t first_particle = 0;

  std::size_t size() const noexcept { return states.size(); }
};

struct GammaSnapshot {
  std::vector<double> values;
};

/// gamma_k = (1/N) sum_i phi_k(x_i), k = 0..K, reduced in fixed block order.
GammaSnapshot empirical_gamma(std::span<const double> states, int K, unsigned threads = 1);

struct GammaEstimate {
  std::vector<double> mean;
  std::vector<double> se;  // sample standard deviation / sqrt(N)
};
GammaEstimate empirical_gamma_with_se(std::span<const double> states, int K, unsigned threads = 1);

/// One synchronous Euler step of the interacting particle system. All
/// measure averages use pre-step states. Charges N^2 drift evaluations.
ParticleEnsemble chaos_step(const ParticleEnsemble& ens, const KernelModel& model, std::span<const double> dW,
                            double h, CostLedger& cost, unsigned threads = 1);

/// One Euler step of the projected particle system. Returns the new
/// ensemble and the pre-step gamma snapshot. Charges (K+1)N drift and
/// (K+1)N basis evaluations.
std::pair<ParticleEnsemble, GammaSnapshot> ppm_step(const ParticleEnsemble& ens, const ProjectedModel& pm,
                                                    std::span<const double> dW, double h, CostLedger& cost,
                                                    unsigned threads = 1);

enum class Engine { chaos, ppm };

struct SimulationConfig {
  TimeGrid grid = TimeGrid::uniform(1.0, 100);
  std::size_t particles = 500;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct SimulationResult {
  ParticleEnsemble terminal;
  GammaTable gamma;  // gamma_hat at every grid node, K = pm.max_order
  CostLedger cost;
  std::vector<double> path_mean;      // ensemble mean at every grid node
  std::vector<double> path_variance;  // unbiased ensemble variance at every node (0 for N = 1)
};

/// Draws N initial states from the model's initial law (stream purpose
/// initial_draw, one draw per particle, taken before any increment).
ParticleEnsemble initial_ensemble(const InitialLaw& law, std::size_t N, std::uint64_t seed, std::uint32_t picard_step,
                                  std::uint32_t level_tag, CostLedger& cost);

/// Stream level tag used by plain particle simulations on this grid.
std::uint32_t simulation_level_tag(const TimeGrid& grid) noexcept;

/// Full simulation on cfg.grid. The chaos engine uses `model`; PPM uses
/// `pm`. Both engines consume the same per-particle Wiener increments for
/// a given seed. For chaos, gamma is computed from the states at each node.
/// Throws NumericalError as soon as a particle state is not finite.
SimulationResult simulate(Engine engine, const KernelModel& model, const ProjectedModel& pm,
                          const SimulationConfig& cfg);

/// Root-mean-square difference of two equally sized state vectors.
double rms_difference(std::span<const double> a, std::span<const double> b);

struct StrongErrorRow {
  int K = 0;
  double error = 0.0;
  /// Ledger cost of the chaos run minus that of the PPM run.
  double cost_gain = 0.0;
  /// Wall-clock seconds saved by PPM; informational only.
  double time_gain_seconds = 0.0;
};

struct StrongErrorSweep {
  std::vector<StrongErrorRow> rows;
  std::optional<LinearFit> fit;  // log E vs K, when at least two rows
};

/// Coupled chaos/PPM strong error at the terminal time for one K.
StrongErrorRow strong_error(const KernelModel& model, const ProjectedModel& pm, const SimulationConfig& cfg);

/// One chaos run against PPM runs for every K in Ks (same increments).
StrongErrorSweep strong_error_sweep(const KernelModel& model, const std::function<ProjectedModel(int)>& projector,
                                    std::span<const int> Ks, const SimulationConfig& cfg);

}  // namespace mvsde
