#include "experiments.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "mvsde/basis.hpp"

namespace mvsde::cli {
namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

std::optional<int> find_small_int(const Config& c, const std::string& key) {
  const auto v = c.find_int(key);
  if (!v) return std::nullopt;
  require(*v >= std::numeric_limits<int>::min() && *v <= std::numeric_limits<int>::max(), key + ": out of range");
  return static_cast<int>(*v);
}

Method parse_method(const std::string& s) {
  if (s == "ppm") return Method::ppm;
  if (s == "mlmc") return Method::mlmc;
  if (s == "chaos") return Method::chaos;
  throw ConfigError("method.methods: unknown method '" + s + "' (expected ppm, mlmc or chaos)");
}

std::size_t to_count(const std::string& key, long long v, long long min) {
  require(v >= min, key + ": must be >= " + std::to_string(min));
  return static_cast<std::size_t>(v);
}

}  // namespace

std::vector<std::string> known_config_keys() {
  return {"model.kernel",       "model.sigma",         "model.T",
          "model.init",         "model.x0",            "model.init_mean",
          "model.init_var",     "model.kernel_width",  "model.kernel_scale",
          "method.N",           "method.K",            "method.L",
          "method.h",           "method.M",            "method.L0",
          "method.eps",         "method.eps0",         "method.gamma_circ",
          "method.c_M",         "method.K_max",        "method.pilot",
          "method.min_samples", "method.samples",      "method.K_list",
          "method.levels",      "method.eps_list",     "method.methods",
          "method.replicates",  "method.picard_init",  "method.picard_init_mean",
          "method.picard_init_var", "method.benchmark", "run.seed",
          "run.threads",        "output.dir"};
}

ExperimentConfig experiment_from(const Config& c) {
  c.check_known(known_config_keys());
  ExperimentConfig e;

  e.kernel = c.get_string("model.kernel", e.kernel);
  require(e.kernel == "gaussian" || e.kernel == "custom", "model.kernel: expected gaussian or custom");
  e.sigma = c.get_double("model.sigma", e.sigma);
  require(std::isfinite(e.sigma) && e.sigma >= 0.0, "model.sigma: must be finite and >= 0");
  e.horizon = c.get_double("model.T", e.horizon);
  require(std::isfinite(e.horizon) && e.horizon > 0.0, "model.T: must be positive");
  e.init = c.get_string("model.init", e.init);
  require(e.init == "point" || e.init == "gaussian", "model.init: expected point or gaussian");
  e.x0 = c.get_double("model.x0", e.x0);
  require(std::isfinite(e.x0), "model.x0: must be finite");
  e.init_mean = c.get_double("model.init_mean", e.init_mean);
  require(std::isfinite(e.init_mean), "model.init_mean: must be finite");
  e.init_variance = c.get_double("model.init_var", e.init_variance);
  require(std::isfinite(e.init_variance) && e.init_variance > 0.0, "model.init_var: must be positive");
  e.kernel_width = c.get_double("model.kernel_width", e.kernel_width);
  require(std::isfinite(e.kernel_width) && e.kernel_width > 0.0, "model.kernel_width: must be positive");
  e.kernel_scale = c.get_double("model.kernel_scale", e.kernel_scale);
  require(std::isfinite(e.kernel_scale), "model.kernel_scale: must be finite");

  if (const auto n = c.find_int("method.N")) e.N = to_count("method.N", *n, 1);
  e.K = find_small_int(c, "method.K");
  if (e.K) require(*e.K >= 0 && *e.K <= 200, "method.K: must be in [0, 200]");
  e.L = find_small_int(c, "method.L");
  if (e.L) require(*e.L >= 0 && *e.L <= 20, "method.L: must be in [0, 20]");
  e.h = c.find_double("method.h");
  if (e.h) require(std::isfinite(*e.h) && *e.h > 0.0, "method.h: must be positive");
  require(!(e.L && e.h), "method.L and method.h are mutually exclusive");
  e.M = find_small_int(c, "method.M");
  if (e.M) require(*e.M >= 1 && *e.M <= 100, "method.M: must be in [1, 100]");
  e.L0 = find_small_int(c, "method.L0");
  if (e.L0) require(*e.L0 >= 0 && *e.L0 <= 20, "method.L0: must be in [0, 20]");

  const double inv_e = std::exp(-1.0);
  e.eps = c.get_double("method.eps", e.eps);
  require(e.eps > 0.0 && e.eps < inv_e, "method.eps: must be in (0, 1/e)");
  e.eps0 = c.get_double("method.eps0", e.eps0);
  require(e.eps0 > 0.0 && e.eps0 < inv_e, "method.eps0: must be in (0, 1/e)");
  e.gamma_circ = c.get_double("method.gamma_circ", e.gamma_circ);
  require(std::isfinite(e.gamma_circ) && e.gamma_circ > 0.0, "method.gamma_circ: must be positive");
  e.c_M = c.get_double("method.c_M", e.c_M);
  require(std::isfinite(e.c_M) && e.c_M > 0.0, "method.c_M: must be positive");
  e.K_max = static_cast<int>(c.get_int("method.K_max", e.K_max));
  require(e.K_max >= 1 && e.K_max <= 200, "method.K_max: must be in [1, 200]");
  e.pilot = to_count("method.pilot", c.get_int("method.pilot", static_cast<long long>(e.pilot)), 2);
  e.min_samples =
      to_count("method.min_samples", c.get_int("method.min_samples", static_cast<long long>(e.min_samples)), 1);
  for (int s : c.get_int_list("method.samples", {})) e.samples.push_back(to_count("method.samples", s, 1));

  e.K_list = c.get_int_list("method.K_list", {});
  for (int k : e.K_list) require(k >= 0 && k <= 200, "method.K_list: entries must be in [0, 200]");
  e.levels = c.get_int_list("method.levels", {});
  for (int l : e.levels) require(l >= 1 && l <= 20, "method.levels: entries must be in [1, 20]");
  e.eps_list = c.get_double_list("method.eps_list", {});
  for (double v : e.eps_list) require(v > 0.0 && v < inv_e, "method.eps_list: entries must be in (0, 1/e)");
  for (const auto& s : c.get_string_list("method.methods", {})) e.methods.push_back(parse_method(s));
  e.replicates = static_cast<int>(c.get_int("method.replicates", e.replicates));
  require(e.replicates >= 1, "method.replicates: must be >= 1");

  const auto init = c.get_string("method.picard_init", "static");
  require(init == "static" || init == "initial", "method.picard_init: expected static or initial");
  e.picard_init = init == "static" ? PicardInit::static_gaussian : PicardInit::initial_law;
  e.picard_init_mean = c.get_double("method.picard_init_mean", e.picard_init_mean);
  require(std::isfinite(e.picard_init_mean), "method.picard_init_mean: must be finite");
  e.picard_init_variance = c.get_double("method.picard_init_var", e.picard_init_variance);
  require(std::isfinite(e.picard_init_variance) && e.picard_init_variance >= 0.0,
          "method.picard_init_var: must be >= 0");
  e.benchmark = c.get_double("method.benchmark", e.benchmark);
  require(std::isfinite(e.benchmark), "method.benchmark: must be finite");

  if (c.has("run.seed")) e.seed = parse_seed(c.get_string("run.seed", ""));
  const auto threads = c.get_int("run.threads", 1);
  require(threads >= 1 && threads <= 1024, "run.threads: must be in [1, 1024]");
  e.threads = static_cast<unsigned>(threads);
  e.out_dir = c.get_string("output.dir", e.out_dir);
  require(!e.out_dir.empty(), "output.dir: must not be empty");
  return e;
}

std::uint64_t require_seed(const ExperimentConfig& cfg) {
  if (!cfg.seed) throw ConfigError("no seed given: use --seed, MVSDE_SEED or run.seed");
  return *cfg.seed;
}

std::size_t particles_or(const ExperimentConfig& cfg, std::size_t fallback) { return cfg.N.value_or(fallback); }

KernelModel make_model(const ExperimentConfig& cfg) {
  InitialLaw init = PointMass{cfg.x0};
  if (cfg.init == "gaussian") init = GaussianLaw{cfg.init_mean, cfg.init_variance};
  return gaussian_interaction_model(cfg.sigma, init, cfg.horizon, cfg.kernel_width, cfg.kernel_scale);
}

ProjectedModel make_projected(const ExperimentConfig& cfg, int K) {
  const bool closed_form = cfg.kernel == "gaussian" && cfg.kernel_width == 1.0 && cfg.kernel_scale == 1.0;
  if (closed_form) {
    const KernelModel m = make_model(cfg);
    return gaussian_projected_model(cfg.sigma, m.initial, cfg.horizon, K);
  }
  return project_kernel(make_model(cfg), HermiteBasis(K), K);
}

TimeGrid particle_grid(const ExperimentConfig& cfg) {
  try {
    if (cfg.L) return TimeGrid::dyadic(cfg.horizon, *cfg.L);
    return TimeGrid::from_step(cfg.horizon, cfg.h.value_or(0.01));
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("method.h: ") + ex.what());
  }
}

AllocationOptions allocation_options(const ExperimentConfig& cfg) {
  AllocationOptions o;
  o.gamma_circ = cfg.gamma_circ;
  o.K_max = cfg.K_max;
  o.c_M = cfg.c_M;
  o.horizon = cfg.horizon;
  o.min_samples = cfg.min_samples;
  if (cfg.L) o.L_override = *cfg.L;
  return o;
}

PicardPlan plan_picard(const ExperimentConfig& cfg, double eps, Payoff pilot_payoff, int default_M,
                       std::optional<int> default_K) {
  require(!cfg.h, "method.h is not used by MLMC; give the level with method.L");
  auto opts = allocation_options(cfg);
  if (!cfg.samples.empty()) opts.L_override = static_cast<int>(cfg.samples.size()) - 1;
  const double one = 1.0;
  const LevelAllocation shape = allocate_levels(eps, std::span<const double>(&one, 1), opts);

  PicardPlan plan;
  plan.K = cfg.K ? *cfg.K : default_K.value_or(shape.K);
  plan.L = shape.L;
  plan.M = cfg.M ? *cfg.M : (default_M > 0 ? default_M : shape.picard_steps);
  plan.table_level = cfg.L0.value_or(plan.L);
  if (!cfg.samples.empty()) {
    plan.samples = cfg.samples;
    return plan;
  }
  PicardConfig pc = picard_config(cfg, plan);
  const ProjectedModel pm = make_projected(cfg, plan.K);
  const GammaTable d0 = initial_table(pc, pm);
  plan.pilot = pilot_variances(d0, pm, plan.L, cfg.pilot, require_seed(cfg), cfg.threads, pilot_payoff);
  opts.L_override = plan.L;
  plan.samples = allocate_levels(eps, plan.pilot.variances, opts).N_per_level;
  return plan;
}

PicardConfig picard_config(const ExperimentConfig& cfg, const PicardPlan& plan) {
  PicardConfig pc;
  pc.picard_steps = plan.M;
  pc.table_level = plan.table_level;
  pc.samples = plan.samples;
  pc.init = cfg.picard_init;
  pc.init_mean = cfg.picard_init_mean;
  pc.init_variance = cfg.picard_init_variance;
  pc.final_payoff = Payoff::identity;
  pc.seed = require_seed(cfg);
  pc.threads = cfg.threads;
  return pc;
}

PicardExperiment picard_experiment(const ExperimentConfig& cfg) {
  PicardExperiment out;
  out.plan = plan_picard(cfg, cfg.eps, Payoff::identity);
  out.result = picard_run(picard_config(cfg, out.plan), make_projected(cfg, out.plan.K));
  return out;
}

DensityComparison density_comparison(const ExperimentConfig& cfg) {
  DensityComparison out;
  const int K = cfg.K.value_or(10);
  const std::uint64_t seed = require_seed(cfg);

  SimulationConfig sc;
  sc.grid = particle_grid(cfg);
  sc.particles = particles_or(cfg, 500);
  require(sc.particles >= 2, "method.N: the density comparison needs at least two particles");
  sc.seed = seed;
  sc.threads = cfg.threads;
  const KernelModel model = make_model(cfg);
  const ProjectedModel pm = make_projected(cfg, K);
  const auto sim = simulate(Engine::ppm, model, pm, sc);
  out.ppm = empirical_gamma_with_se(sim.terminal.states, K, cfg.threads);

  const auto grid = default_density_grid();
  out.ppm_raw = reconstruct(out.ppm.mean, grid);
  out.ppm_raw.t = cfg.horizon;
  out.ppm_raw.source = "ppm";
  out.ppm_fixed = nonneg_fix(out.ppm_raw);

  ExperimentConfig mlmc_cfg = cfg;
  mlmc_cfg.h.reset();
  if (!cfg.L0) mlmc_cfg.L0 = 5;
  out.plan = plan_picard(mlmc_cfg, density_epsilon(cfg.eps0), Payoff::basis, 5, K);
  require(out.plan.M >= 2, "method.M: the density comparison needs at least two Picard steps");
  const auto tabs = picard_tables(picard_config(mlmc_cfg, out.plan), pm, out.plan.M);

  for (int m = 1; m < static_cast<int>(tabs.tables.size()); ++m) {
    const auto& table = tabs.tables[static_cast<std::size_t>(m)];
    const auto& se = tabs.terminal_se[static_cast<std::size_t>(m)];
    const auto gamma = table.column(table.num_nodes() - 1);
    DensityStep step;
    step.picard_step = m;
    double d2 = 0.0, se2 = 0.0;
    for (int k = 0; k <= K; ++k) {
      const auto i = static_cast<std::size_t>(k);
      const double d = gamma[i] - out.ppm.mean[i];
      d2 += d * d;
      se2 += out.ppm.se[i] * out.ppm.se[i] + se[i] * se[i];
    }
    step.distance = std::sqrt(d2);
    step.combined_se = std::sqrt(se2);
    step.raw = reconstruct(gamma, grid);
    step.raw.t = cfg.horizon;
    step.raw.source = "mlmc";
    step.raw.picard_step = m;
    step.fixed = nonneg_fix(step.raw);
    out.steps.push_back(std::move(step));
  }
  return out;
}

RatesExperiment rates_experiment(const ExperimentConfig& cfg) {
  const int M = cfg.M.value_or(4);
  const int L0 = cfg.L0.value_or(5);
  const int K = cfg.K.value_or(10);
  const std::size_t N = particles_or(cfg, 100000);
  std::vector<int> levels = cfg.levels.empty() ? std::vector<int>{1, 2, 3, 4, 5} : cfg.levels;
  require(levels.size() >= 3, "method.levels: need at least three levels");

  PicardConfig pc;
  pc.picard_steps = M;
  pc.table_level = L0;
  pc.samples.assign(static_cast<std::size_t>(L0) + 1, N);
  pc.init = cfg.picard_init;
  pc.init_mean = cfg.picard_init_mean;
  pc.init_variance = cfg.picard_init_variance;
  pc.seed = require_seed(cfg);
  pc.threads = cfg.threads;
  const ProjectedModel pm = make_projected(cfg, K);
  const auto tabs = picard_tables(pc, pm, M);

  RatesExperiment out;
  for (int m = 1; m <= M; ++m) {
    out.tables.push_back(rate_test(tabs.tables[static_cast<std::size_t>(m - 1)], pm, levels, N, pc.seed,
                                   static_cast<std::uint32_t>(m), cfg.threads));
  }
  return out;
}

}  // namespace mvsde::cli
