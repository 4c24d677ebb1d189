#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>

#include "config.hpp"
#include "csv.hpp"
#include "experiments.hpp"
#include "mvsde/error.hpp"

namespace mvsde::cli {
namespace {

namespace fs = std::filesystem;

struct Invocation {
  std::string config_path;
  std::map<std::string, std::string> overrides;
  std::optional<std::string> seed;
};

struct Context {
  ExperimentConfig cfg;
  std::ostream& out;
  std::ostream& err;

  std::string path(const std::string& name) const { return (fs::path(cfg.out_dir) / name).string(); }
};

const std::vector<std::pair<std::string, std::string>> kFlagKeys = {
    {"--threads", "run.threads"},
    {"--out-dir", "output.dir"},
    {"--kernel", "model.kernel"},
    {"--sigma", "model.sigma"},
    {"--T", "model.T"},
    {"--init", "model.init"},
    {"--x0", "model.x0"},
    {"--init-mean", "model.init_mean"},
    {"--init-var", "model.init_var"},
    {"--kernel-width", "model.kernel_width"},
    {"--kernel-scale", "model.kernel_scale"},
    {"--N", "method.N"},
    {"--K", "method.K"},
    {"--L", "method.L"},
    {"--h", "method.h"},
    {"--M", "method.M"},
    {"--L0", "method.L0"},
    {"--eps", "method.eps"},
    {"--eps0", "method.eps0"},
    {"--gamma-circ", "method.gamma_circ"},
    {"--c-M", "method.c_M"},
    {"--K-max", "method.K_max"},
    {"--pilot", "method.pilot"},
    {"--min-samples", "method.min_samples"},
    {"--samples", "method.samples"},
    {"--K-range", "method.K_list"},
    {"--levels", "method.levels"},
    {"--eps-list", "method.eps_list"},
    {"--methods", "method.methods"},
    {"--replicates", "method.replicates"},
    {"--picard-init", "method.picard_init"},
    {"--benchmark", "method.benchmark"},
};

void add_flags(CLI::App& sub, Invocation& inv) {
  sub.add_option("--config", inv.config_path, "key = value configuration file");
  sub.add_option_function<std::string>(
      "--seed", [&inv](const std::string& v) { inv.seed = v; }, "random seed (overrides MVSDE_SEED and run.seed)");
  for (const auto& [flag, key] : kFlagKeys) {
    sub.add_option_function<std::string>(
        flag, [&inv, key = key](const std::string& v) { inv.overrides[key] = v; }, "sets " + key);
  }
}

ExperimentConfig resolve(const Invocation& inv) {
  Config c = inv.config_path.empty() ? Config{} : Config::load(inv.config_path);
  for (const auto& [key, value] : inv.overrides) c.set(key, value);
  // A level or step given on the command line replaces the other from the file.
  if (inv.overrides.count("method.L") && !inv.overrides.count("method.h")) c.erase("method.h");
  if (inv.overrides.count("method.h") && !inv.overrides.count("method.L")) c.erase("method.L");
  if (inv.seed) {
    c.set("run.seed", *inv.seed);
  } else if (const char* env = std::getenv("MVSDE_SEED"); env != nullptr && *env != '\0') {
    c.set("run.seed", env);
  }
  return experiment_from(c);
}

void write_gamma_rows(CsvWriter& w, const GammaTable& table) {
  for (int k = 0; k <= table.max_order(); ++k) {
    for (int j = 0; j < table.num_nodes(); ++j) {
      w.row({static_cast<long long>(table.picard_step()), static_cast<long long>(k), static_cast<long long>(j),
             table.grid().time(j), table.at(k, j)});
    }
  }
}

const std::vector<std::string> kGammaHeader = {"picard_step", "k", "t_index", "t", "value"};
const std::vector<std::string> kDensityHeader = {"method", "picard_step", "t", "y", "value_raw", "value_fixed"};

void write_density_rows(CsvWriter& w, const DensityEstimate& raw, const DensityEstimate& fixed) {
  for (std::size_t i = 0; i < raw.grid.size(); ++i) {
    w.row({raw.source, static_cast<long long>(raw.picard_step), raw.t, raw.grid[i], raw.values[i], fixed.values[i]});
  }
}

void write_cost(const std::string& path, const CostLedger& cost) {
  CsvWriter w(path, {"counter", "value"});
  w.row({std::string("rng_draws"), static_cast<unsigned long long>(cost.rng_draws())});
  w.row({std::string("drift_evals"), static_cast<unsigned long long>(cost.drift_evals())});
  w.row({std::string("basis_evals"), static_cast<unsigned long long>(cost.basis_evals())});
  w.row({std::string("total"), static_cast<unsigned long long>(cost.total())});
  w.close();
}

void cmd_particles(const Context& ctx, Engine engine) {
  const auto& cfg = ctx.cfg;
  const int K = cfg.K.value_or(10);
  SimulationConfig sc;
  sc.grid = particle_grid(cfg);
  sc.particles = particles_or(cfg, 500);
  sc.seed = require_seed(cfg);
  sc.threads = cfg.threads;
  const KernelModel model = make_model(cfg);
  const ProjectedModel pm = make_projected(cfg, K);
  const auto res = simulate(engine, model, pm, sc);
  const std::string name = engine == Engine::ppm ? "ppm" : "chaos";

  CsvWriter gamma(ctx.path("gamma.csv"), kGammaHeader);
  write_gamma_rows(gamma, res.gamma);
  gamma.close();

  CsvWriter summary(ctx.path("summary.csv"), {"t_index", "t", "mean", "variance"});
  for (int j = 0; j <= sc.grid.num_steps(); ++j) {
    const auto i = static_cast<std::size_t>(j);
    summary.row({static_cast<long long>(j), sc.grid.time(j), res.path_mean[i], res.path_variance[i]});
  }
  summary.close();
  write_cost(ctx.path("cost.csv"), res.cost);

  auto raw = reconstruct(res.gamma.column(sc.grid.num_steps()), default_density_grid());
  raw.t = cfg.horizon;
  raw.source = name;
  const auto fixed = nonneg_fix(raw);
  CsvWriter density(ctx.path("density.csv"), kDensityHeader);
  write_density_rows(density, raw, fixed);
  density.close();

  ctx.out << name << ": N=" << sc.particles << " K=" << K << " steps=" << sc.grid.num_steps()
          << " mean(X_T)=" << format_double(res.path_mean.back()) << " cost=" << res.cost.total()
          << " clipped_mass=" << format_double(fixed.clipped_mass) << '\n';
}

void cmd_picard(const Context& ctx) {
  const auto exp = picard_experiment(ctx.cfg);
  const auto& r = exp.result;

  CsvWriter gamma(ctx.path("gamma.csv"), kGammaHeader);
  for (const auto& t : r.tables) write_gamma_rows(gamma, t);
  gamma.close();

  CsvWriter steps(ctx.path("picard.csv"), {"picard_step", "rng_draws", "drift_evals", "basis_evals", "total"});
  for (std::size_t m = 0; m < r.step_costs.size(); ++m) {
    const auto& c = r.step_costs[m];
    steps.row({static_cast<long long>(m + 1), static_cast<unsigned long long>(c.rng_draws()),
               static_cast<unsigned long long>(c.drift_evals()), static_cast<unsigned long long>(c.basis_evals()),
               static_cast<unsigned long long>(c.total())});
  }
  steps.close();

  CsvWriter path(ctx.path("payoff.csv"), {"t_index", "t", "value"});
  for (int j = 0; j <= r.payoff_grid.num_steps(); ++j) {
    path.row({static_cast<long long>(j), r.payoff_grid.time(j), r.payoff_path[static_cast<std::size_t>(j)]});
  }
  path.close();

  CsvWriter est(ctx.path("estimate.csv"),
                {"epsilon", "K", "L", "picard_steps", "estimate", "standard_error", "total_cost"});
  est.row({ctx.cfg.eps, static_cast<long long>(exp.plan.K), static_cast<long long>(exp.plan.L),
           static_cast<long long>(exp.plan.M), r.estimate, r.standard_error,
           static_cast<unsigned long long>(r.cost.total())});
  est.close();

  ctx.out << "M_T(P) = " << format_double(r.estimate) << " (se " << format_double(r.standard_error) << ")\n";
  ctx.out << "K=" << exp.plan.K << " L=" << exp.plan.L << " M=" << exp.plan.M << " N_0=" << exp.plan.samples.front()
          << '\n';
  for (std::size_t m = 0; m < r.step_costs.size(); ++m) {
    const double share = static_cast<double>(r.step_costs[m].total()) / static_cast<double>(r.cost.total());
    ctx.out << "  picard step " << m + 1 << ": cost " << r.step_costs[m].total() << " ("
            << format_double(std::round(share * 1000.0) / 10.0) << "%)\n";
  }
  ctx.out << "  total cost " << r.cost.total() << '\n';
}

void cmd_strong_error(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  std::vector<int> Ks;
  std::set<int> seen;
  const auto requested = cfg.K_list.empty() ? std::vector<int>{1, 2,  3,  4,  5,  6,  7,  8,  9,  10,
                                                               11, 12, 13, 14, 15, 16, 17, 18, 19, 20}
                                            : cfg.K_list;
  for (int k : requested) {
    if (seen.insert(k).second) {
      Ks.push_back(k);
    } else {
      ctx.err << "warning: duplicate K = " << k << " ignored\n";
    }
  }
  SimulationConfig sc;
  sc.grid = particle_grid(cfg);
  sc.particles = particles_or(cfg, 500);
  sc.seed = require_seed(cfg);
  sc.threads = cfg.threads;
  const auto sweep =
      strong_error_sweep(make_model(cfg), [&cfg](int K) { return make_projected(cfg, K); }, Ks, sc);

  CsvWriter w(ctx.path("strong_error.csv"), {"K", "E_NK", "cost_gain"});
  double time_gain = 0.0;
  for (const auto& row : sweep.rows) {
    w.row({static_cast<long long>(row.K), row.error, row.cost_gain});
    time_gain += row.time_gain_seconds;
  }
  w.close();
  if (sweep.fit) {
    ctx.out << "log E vs K: slope " << format_double(sweep.fit->slope) << ", R^2 " << format_double(sweep.fit->r_squared)
            << '\n';
  } else {
    ctx.err << "warning: a single K value gives no fit\n";
  }
  ctx.out << "wall-clock time saved by PPM: " << format_double(time_gain) << " s\n";
}

void cmd_rates(const Context& ctx) {
  const auto res = rates_experiment(ctx.cfg);
  CsvWriter w(ctx.path("rates.csv"), {"picard_step", "level", "a_ell", "b_ell"});
  for (const auto& t : res.tables) {
    for (const auto& row : t.rows) {
      w.row({static_cast<long long>(t.picard_step), static_cast<long long>(row.level), row.a, row.b});
    }
  }
  w.close();
  for (const auto& t : res.tables) {
    ctx.out << "picard step " << t.picard_step << ": alpha_hat " << format_double(t.alpha_hat) << ", beta_hat "
            << format_double(t.beta_hat) << '\n';
  }
}

void cmd_complexity(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto methods =
      cfg.methods.empty() ? std::vector<Method>{Method::ppm, Method::mlmc, Method::chaos} : cfg.methods;
  const auto eps = cfg.eps_list.empty() ? std::vector<double>{0.04, 0.02, 0.01, 0.005} : cfg.eps_list;
  const std::uint64_t seed = require_seed(cfg);
  std::vector<std::uint64_t> seeds;
  for (int r = 0; r < cfg.replicates; ++r) seeds.push_back(seed + static_cast<std::uint64_t>(r));

  ComplexityOptions opts;
  opts.alloc = allocation_options(cfg);
  opts.alloc.L_override = -1;
  opts.benchmark = cfg.benchmark;
  opts.pilot_samples = cfg.pilot;
  opts.threads = cfg.threads;
  const auto rows = complexity_sweep(methods, eps, seeds, make_model(cfg),
                                     [&cfg](int K) { return make_projected(cfg, K); }, opts);

  CsvWriter w(ctx.path("complexity.csv"), {"method", "epsilon", "rng_draws", "drift_evals", "mse_est"});
  for (const auto& r : rows) w.row({method_name(r.method), r.epsilon, r.rng_draws, r.drift_evals, r.mse});
  w.close();
  if (eps.size() >= 2) {
    for (Method m : methods) {
      const auto fit = complexity_slope(rows, m);
      ctx.out << method_name(m) << ": cost slope vs log(1/eps) " << format_double(fit.slope) << '\n';
    }
  }
}

void cmd_density(const Context& ctx) {
  const auto cmp = density_comparison(ctx.cfg);
  CsvWriter w(ctx.path("density.csv"), kDensityHeader);
  write_density_rows(w, cmp.ppm_raw, cmp.ppm_fixed);
  for (const auto& s : cmp.steps) write_density_rows(w, s.raw, s.fixed);
  w.close();

  CsvWriter a(ctx.path("agreement.csv"),
              {"picard_step", "l2_distance", "combined_se", "ratio", "clipped_mass_ppm", "clipped_mass_mlmc"});
  for (const auto& s : cmp.steps) {
    a.row({static_cast<long long>(s.picard_step), s.distance, s.combined_se, s.distance / s.combined_se,
           cmp.ppm_fixed.clipped_mass, s.fixed.clipped_mass});
  }
  a.close();
  ctx.out << "K=" << cmp.plan.K << " L=" << cmp.plan.L << " M=" << cmp.plan.M << '\n';
  for (const auto& s : cmp.steps) {
    ctx.out << "picard step " << s.picard_step << ": L2 distance " << format_double(s.distance) << ", 3 x se "
            << format_double(3.0 * s.combined_se) << '\n';
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation of McKean-Vlasov SDEs by particle, projection and multilevel methods", "mvsde"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  Invocation inv;
  std::function<void(const Context&)> action;

  const auto add = [&](const std::string& name, const std::string& help, std::function<void(const Context&)> fn) {
    auto* sub = app.add_subcommand(name, help);
    sub->set_help_flag("--help", "print this help and exit");
    add_flags(*sub, inv);
    sub->callback([&action, fn = std::move(fn)] { action = fn; });
  };
  add("chaos", "interacting particle system", [](const Context& c) { cmd_particles(c, Engine::chaos); });
  add("ppm", "projected particle method", [](const Context& c) { cmd_particles(c, Engine::ppm); });
  add("picard", "iterative MLMC with Picard steps", cmd_picard);
  add("strong-error", "PPM against the particle system over a K range", cmd_strong_error);
  add("rates", "weak and strong level-difference rates per Picard step", cmd_rates);
  add("complexity", "ledger cost against accuracy", cmd_complexity);
  add("density", "PPM and Picard density reconstructions", cmd_density);

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.push_back("mvsde");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kConfigError;
  }

  try {
    Context ctx{resolve(inv), out, err};
    fs::create_directories(ctx.cfg.out_dir);
    const auto t0 = std::chrono::steady_clock::now();
    action(ctx);
    const auto t1 = std::chrono::steady_clock::now();
    out << "wall time " << format_double(std::chrono::duration<double>(t1 - t0).count()) << " s\n";
    return kSuccess;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::domain_error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace mvsde::cli
