#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "mvsde/density.hpp"
#include "mvsde/mlmc.hpp"
#include "mvsde/model.hpp"
#include "mvsde/particle.hpp"

namespace mvsde::cli {

/// Typed view of the flat configuration.
struct ExperimentConfig {
  // model.*
  std::string kernel = "gaussian";  // gaussian (closed form) | custom (quadrature)
  double sigma = 0.1;
  double horizon = 1.0;
  std::string init = "point";  // point | gaussian
  double x0 = 0.5;
  double init_mean = 0.0;
  double init_variance = 1.0;
  double kernel_width = 1.0;
  double kernel_scale = 1.0;

  // method.*
  std::optional<std::size_t> N;
  std::optional<int> K;
  std::optional<int> L;
  std::optional<double> h;
  std::optional<int> M;
  std::optional<int> L0;
  double eps = 0.03;
  double eps0 = 0.03;
  double gamma_circ = 1.2;
  double c_M = 1.0;
  int K_max = 20;
  std::size_t pilot = 1000;
  std::size_t min_samples = 1;
  std::vector<std::size_t> samples;
  std::vector<int> K_list;
  std::vector<int> levels;
  std::vector<double> eps_list;
  std::vector<Method> methods;
  int replicates = 3;
  PicardInit picard_init = PicardInit::static_gaussian;
  double picard_init_mean = 0.5;
  double picard_init_variance = 1.0;
  double benchmark = 1.4951;

  // run / output
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string out_dir = ".";
};

std::vector<std::string> known_config_keys();

/// Validates and converts; throws ConfigError.
ExperimentConfig experiment_from(const Config& cfg);

std::uint64_t require_seed(const ExperimentConfig& cfg);

KernelModel make_model(const ExperimentConfig& cfg);
ProjectedModel make_projected(const ExperimentConfig& cfg, int K);

std::size_t particles_or(const ExperimentConfig& cfg, std::size_t fallback);

/// Particle-method grid from L or h (default h = 0.01).
TimeGrid particle_grid(const ExperimentConfig& cfg);

AllocationOptions allocation_options(const ExperimentConfig& cfg);

struct PicardPlan {
  int K = 0;
  int L = 0;
  int M = 1;
  int table_level = 0;
  std::vector<std::size_t> samples;
  PilotResult pilot;
};

/// Truncation, levels, Picard steps and samples for accuracy eps, with
/// explicit settings taking precedence over the eps rules.
PicardPlan plan_picard(const ExperimentConfig& cfg, double eps, Payoff pilot_payoff, int default_M = 0,
                       std::optional<int> default_K = std::nullopt);

PicardConfig picard_config(const ExperimentConfig& cfg, const PicardPlan& plan);

struct PicardExperiment {
  PicardPlan plan;
  PicardResult result;
};
PicardExperiment picard_experiment(const ExperimentConfig& cfg);

struct DensityStep {
  int picard_step = 0;
  double distance = 0.0;      // coefficient-space L2 distance to the PPM estimate
  double combined_se = 0.0;   // sqrt(sum_k se_ppm^2 + se_mlmc^2)
  DensityEstimate raw;
  DensityEstimate fixed;
};

struct DensityComparison {
  GammaEstimate ppm;
  DensityEstimate ppm_raw;
  DensityEstimate ppm_fixed;
  PicardPlan plan;
  std::vector<DensityStep> steps;
};

/// PPM density at T against every Picard table D^1..D^{M-1} at T.
DensityComparison density_comparison(const ExperimentConfig& cfg);

struct RatesExperiment {
  std::vector<RateTable> tables;  // one per Picard step m = 1..M
};
RatesExperiment rates_experiment(const ExperimentConfig& cfg);

}  // namespace mvsde::cli
