#include "mvsde/mlmc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mvsde/basis.hpp"
#include "mvsde/error.hpp"
#include "mvsde/parallel.hpp"
#include "mvsde/particle.hpp"
#include "mvsde/rng.hpp"

namespace mvsde {

int payoff_dimension(Payoff payoff, int K) noexcept { return payoff == Payoff::basis ? K + 1 : 1; }

namespace {

void payoff_values(double x, Payoff payoff, std::span<double> out) {
  switch (payoff) {
    case Payoff::basis:
      phi_all(x, out);
      break;
    case Payoff::identity:
      out[0] = x;
      break;
    case Payoff::phi0:
      phi_all(x, out.first(1));
      break;
  }
}

// Everything needed to simulate one coupled pair at a level, shared by all particles.
struct LevelSetup {
  int level = 0;
  int fine_steps = 1;
  double h = 1.0;
  std::size_t dim = 1;
  std::vector<double> gamma_fine;    // fine_steps x dim, frozen table at fine nodes
  std::vector<double> gamma_coarse;  // fine_steps/2 x dim
  PhiloxKey increment_key{};
  PhiloxKey initial_key{};
  const ProjectedModel* pm = nullptr;
};

LevelSetup make_setup(const GammaTable& frozen, const ProjectedModel& pm, int level, std::uint64_t seed,
                      std::uint32_t picard_step) {
  if (level < 0 || level > 24) throw std::invalid_argument("level must be in [0, 24]");
  if (frozen.max_order() != pm.max_order) throw std::invalid_argument("frozen table order does not match model");
  if (std::abs(frozen.grid().horizon() - pm.horizon) > 1e-12 * pm.horizon) {
    throw std::invalid_argument("frozen table grid does not cover [0, T]");
  }
  LevelSetup s;
  s.level = level;
  s.fine_steps = 1 << level;
  s.h = pm.horizon / s.fine_steps;
  s.dim = static_cast<std::size_t>(pm.max_order) + 1;
  s.pm = &pm;
  s.increment_key = family_key(seed, picard_step, static_cast<std::uint32_t>(level), StreamPurpose::increment);
  s.initial_key = family_key(seed, picard_step, static_cast<std::uint32_t>(level), StreamPurpose::initial_draw);
  const TimeGrid fine = TimeGrid::dyadic(pm.horizon, level);
  s.gamma_fine.resize(static_cast<std::size_t>(s.fine_steps) * s.dim);
  for (int j = 0; j < s.fine_steps; ++j) {
    interpolate_gamma(frozen, fine.time(j), std::span<double>(s.gamma_fine.data() + j * s.dim, s.dim));
  }
  if (level > 0) {
    const TimeGrid coarse = TimeGrid::dyadic(pm.horizon, level - 1);
    const int nc = s.fine_steps / 2;
    s.gamma_coarse.resize(static_cast<std::size_t>(nc) * s.dim);
    for (int j = 0; j < nc; ++j) {
      interpolate_gamma(frozen, coarse.time(j), std::span<double>(s.gamma_coarse.data() + j * s.dim, s.dim));
    }
  }
  return s;
}

double initial_state(const LevelSetup& s, std::uint64_t particle) {
  if (const auto* p = std::get_if<PointMass>(&s.pm->initial)) return p->x0;
  const auto& g = std::get<GaussianLaw>(s.pm->initial);
  return g.mean + std::sqrt(g.variance) * normal_pair(s.initial_key, particle, 0)[0];
}

inline double euler(const LevelSetup& s, double y, const double* gamma, double h, double dW, std::span<double> scratch,
                    std::uint64_t particle, int step) {
  const std::span<const double> g(gamma, s.dim);
  const double next = y + s.pm->drift(y, g, scratch) * h + s.pm->diffusion(y, g, scratch) * dW;
  if (!std::isfinite(next)) {
    throw NumericalError("non-finite state for particle " + std::to_string(particle) + " at level " +
                         std::to_string(s.level) + " step " + std::to_string(step));
  }
  return next;
}

// Fine path (fine_steps+1 nodes) and, when coarse is non-empty, the coarse
// path (fine_steps/2+1 nodes) driven by the summed fine increments.
void simulate_pair(const LevelSetup& s, std::uint64_t particle, std::span<double> fine, std::span<double> coarse,
                   std::span<double> scratch, double* fine_dW = nullptr, double* coarse_dW = nullptr) {
  const double x0 = initial_state(s, particle);
  const double sd = std::sqrt(s.h);
  fine[0] = x0;
  if (s.level == 0) {
    const double dW = sd * normal_pair(s.increment_key, particle, 0)[0];
    if (fine_dW) fine_dW[0] = dW;
    fine[1] = euler(s, x0, s.gamma_fine.data(), s.h, dW, scratch, particle, 0);
    return;
  }
  const bool with_coarse = !coarse.empty();
  if (with_coarse) coarse[0] = x0;
  const int nc = s.fine_steps / 2;
  for (int j = 0; j < nc; ++j) {
    const auto z = normal_pair(s.increment_key, particle, static_cast<std::uint64_t>(j));
    const double dW0 = sd * z[0];
    const double dW1 = sd * z[1];
    const int f = 2 * j;
    fine[f + 1] = euler(s, fine[f], s.gamma_fine.data() + f * s.dim, s.h, dW0, scratch, particle, f);
    fine[f + 2] = euler(s, fine[f + 1], s.gamma_fine.data() + (f + 1) * s.dim, s.h, dW1, scratch, particle, f + 1);
    if (fine_dW) {
      fine_dW[f] = dW0;
      fine_dW[f + 1] = dW1;
    }
    if (with_coarse) {
      const double dWc = dW0 + dW1;
      if (coarse_dW) coarse_dW[j] = dWc;
      coarse[j + 1] = euler(s, coarse[j], s.gamma_coarse.data() + j * s.dim, 2.0 * s.h, dWc, scratch, particle, j);
    }
  }
}

// Payoff of a path at every node of the target grid, linear in time between
// path nodes when the path is coarser than the target. Returns the number
// of payoff evaluations.
std::size_t path_payoff(std::span<const double> path, int path_steps, int target_steps, Payoff payoff,
                        std::size_t comps, std::span<double> out, std::vector<double>& cache) {
  const std::size_t nodes = static_cast<std::size_t>(target_steps) + 1;
  std::vector<double> buf(payoff == Payoff::basis ? comps : 1);
  if (path_steps >= target_steps) {
    const int stride = path_steps / target_steps;
    for (std::size_t j = 0; j < nodes; ++j) {
      payoff_values(path[j * static_cast<std::size_t>(stride)], payoff, buf);
      for (std::size_t c = 0; c < comps; ++c) out[c * nodes + j] = buf[c];
    }
    return nodes;
  }
  const std::size_t pnodes = static_cast<std::size_t>(path_steps) + 1;
  cache.resize(pnodes * comps);
  for (std::size_t i = 0; i < pnodes; ++i) {
    payoff_values(path[i], payoff, buf);
    for (std::size_t c = 0; c < comps; ++c) cache[i * comps + c] = buf[c];
  }
  const int ratio = target_steps / path_steps;
  for (std::size_t j = 0; j < nodes; ++j) {
    const std::size_t i = j / static_cast<std::size_t>(ratio);
    const std::size_t rem = j % static_cast<std::size_t>(ratio);
    for (std::size_t c = 0; c < comps; ++c) {
      const double a = cache[i * comps + c];
      double v = a;
      if (rem != 0) {
        const double fr = static_cast<double>(rem) / ratio;
        v = a + fr * (cache[(i + 1) * comps + c] - a);
      }
      out[c * nodes + j] = v;
    }
  }
  return pnodes;
}

struct LevelPass {
  std::vector<double> sums;  // comps x nodes: sum over particles of P_f - P_c
  LevelStatistics stats;
};

LevelPass run_level(const GammaTable& frozen, const ProjectedModel& pm, int level, std::size_t N, bool with_coarse,
                    const MultilevelRequest& req) {
  if (N == 0) throw std::invalid_argument("every level needs at least one sample");
  if (req.target_level < 0 || req.target_level > 24) throw std::invalid_argument("target level must be in [0, 24]");
  const LevelSetup s = make_setup(frozen, pm, level, req.seed, req.picard_step);
  const bool coupled = with_coarse && level > 0;
  const auto comps = static_cast<std::size_t>(payoff_dimension(req.payoff, pm.max_order));
  const int target_steps = 1 << req.target_level;
  const std::size_t nodes = static_cast<std::size_t>(target_steps) + 1;
  const std::size_t grid_dim = comps * nodes;
  // Layout: [grid sums | terminal squared sums | payoff evaluation count].
  const std::size_t dim = grid_dim + comps + 1;

  auto acc_all = blocked_sum(N, dim, req.threads, [&](std::size_t b, std::size_t e, std::span<double> acc) {
    std::vector<double> fine(static_cast<std::size_t>(s.fine_steps) + 1);
    std::vector<double> coarse(coupled ? static_cast<std::size_t>(s.fine_steps / 2) + 1 : 0);
    std::vector<double> scratch(s.dim);
    std::vector<double> pf(grid_dim), pc(grid_dim), cache;
    for (std::size_t i = b; i < e; ++i) {
      simulate_pair(s, i, fine, coarse, scratch);
      double evals = static_cast<double>(path_payoff(fine, s.fine_steps, target_steps, req.payoff, comps, pf, cache));
      if (coupled) {
        evals += static_cast<double>(path_payoff(coarse, s.fine_steps / 2, target_steps, req.payoff, comps, pc, cache));
        for (std::size_t x = 0; x < grid_dim; ++x) pf[x] -= pc[x];
      }
      for (std::size_t x = 0; x < grid_dim; ++x) acc[x] += pf[x];
      for (std::size_t c = 0; c < comps; ++c) {
        const double d = pf[c * nodes + nodes - 1];
        acc[grid_dim + c] += d * d;
      }
      acc[dim - 1] += evals;
    }
  });

  LevelPass pass;
  pass.sums.assign(acc_all.begin(), acc_all.begin() + static_cast<std::ptrdiff_t>(grid_dim));
  LevelStatistics& st = pass.stats;
  st.level = level;
  st.samples = N;
  const double n = static_cast<double>(N);
  st.mean.resize(comps);
  st.second_moment.resize(comps);
  st.variance.resize(comps);
  for (std::size_t c = 0; c < comps; ++c) {
    const double sum = acc_all[c * nodes + nodes - 1];
    const double sq = acc_all[grid_dim + c];
    st.mean[c] = sum / n;
    st.second_moment[c] = sq / n;
    st.variance[c] = N > 1 ? std::max(0.0, (sq - sum * sum / n) / (n - 1.0)) : 0.0;
  }
  const auto n64 = static_cast<std::uint64_t>(N);
  const auto steps = static_cast<std::uint64_t>(s.fine_steps) + (coupled ? static_cast<std::uint64_t>(s.fine_steps / 2) : 0);
  st.cost.add_drift_evals(n64 * steps * static_cast<std::uint64_t>(pm.drift_cost()));
  st.cost.add_rng_draws(n64 * static_cast<std::uint64_t>(s.fine_steps));
  if (std::holds_alternative<GaussianLaw>(pm.initial)) st.cost.add_rng_draws(n64);
  if (req.payoff != Payoff::identity) {
    const auto per_eval = static_cast<std::uint64_t>(req.payoff == Payoff::basis ? comps : 1);
    st.cost.add_basis_evals(static_cast<std::uint64_t>(acc_all[dim - 1]) * per_eval);
  }
  return pass;
}

MultilevelEstimate assemble(std::vector<LevelPass>& passes, double horizon, int target_level, std::size_t comps) {
  MultilevelEstimate est;
  est.grid = TimeGrid::dyadic(horizon, target_level);
  est.components = static_cast<int>(comps);
  est.terminal_se.assign(comps, 0.0);
  for (std::size_t l = 0; l < passes.size(); ++l) {
    const double n = static_cast<double>(passes[l].stats.samples);
    if (l == 0) {
      est.values.resize(passes[l].sums.size());
      for (std::size_t x = 0; x < est.values.size(); ++x) est.values[x] = passes[l].sums[x] / n;
    } else {
      for (std::size_t x = 0; x < est.values.size(); ++x) est.values[x] += passes[l].sums[x] / n;
    }
    for (std::size_t c = 0; c < comps; ++c) est.terminal_se[c] += passes[l].stats.variance[c] / n;
    est.cost += passes[l].stats.cost;
    est.levels.push_back(std::move(passes[l].stats));
  }
  for (auto& v : est.terminal_se) v = std::sqrt(v);
  return est;
}

}  // namespace

CoupledPaths coupled_pair_simulate(int level, const GammaTable& frozen, const ProjectedModel& pm, std::size_t N,
                                   std::uint64_t seed, std::uint32_t picard_step) {
  const LevelSetup s = make_setup(frozen, pm, level, seed, picard_step);
  CoupledPaths out;
  out.level = level;
  out.particles = N;
  out.fine_nodes = s.fine_steps + 1;
  out.coarse_nodes = level > 0 ? s.fine_steps / 2 + 1 : 0;
  const auto fn = static_cast<std::size_t>(out.fine_nodes);
  const auto cn = static_cast<std::size_t>(out.coarse_nodes);
  const auto fs = static_cast<std::size_t>(s.fine_steps);
  const std::size_t cs = level > 0 ? fs / 2 : 0;
  out.fine.resize(N * fn);
  out.coarse.resize(N * cn);
  out.fine_increments.resize(N * fs);
  out.coarse_increments.resize(N * cs);
  std::vector<double> scratch(s.dim);
  for (std::size_t i = 0; i < N; ++i) {
    simulate_pair(s, i, std::span<double>(out.fine.data() + i * fn, fn), std::span<double>(out.coarse.data() + i * cn, cn),
                  scratch, out.fine_increments.data() + i * fs, cs ? out.coarse_increments.data() + i * cs : nullptr);
  }
  return out;
}

MultilevelEstimate multilevel_estimate(const GammaTable& frozen, const ProjectedModel& pm,
                                       const MultilevelRequest& req) {
  if (req.samples.empty()) throw std::invalid_argument("multilevel_estimate: no levels requested");
  std::vector<LevelPass> passes;
  for (std::size_t l = 0; l < req.samples.size(); ++l) {
    passes.push_back(run_level(frozen, pm, static_cast<int>(l), req.samples[l], true, req));
  }
  return assemble(passes, pm.horizon, req.target_level,
                  static_cast<std::size_t>(payoff_dimension(req.payoff, pm.max_order)));
}

MultilevelEstimate plain_mc_estimate(const GammaTable& frozen, const ProjectedModel& pm, int level, std::size_t N,
                                     const MultilevelRequest& req) {
  std::vector<LevelPass> passes;
  passes.push_back(run_level(frozen, pm, level, N, false, req));
  return assemble(passes, pm.horizon, req.target_level,
                  static_cast<std::size_t>(payoff_dimension(req.payoff, pm.max_order)));
}

LevelAllocation allocate_levels(double eps, std::span<const double> pilot_variances, const AllocationOptions& opts) {
  if (!(eps > 0.0) || !(eps < std::exp(-1.0))) throw std::invalid_argument("allocate_levels: need 0 < eps < 1/e");
  if (pilot_variances.empty()) throw std::invalid_argument("allocate_levels: no pilot variances");
  if (!(opts.gamma_circ > 0.0)) throw std::invalid_argument("allocate_levels: gamma_circ must be positive");
  const double log_inv = std::log(1.0 / eps);

  LevelAllocation a;
  a.L = opts.L_override >= 0 ? opts.L_override
                             : std::max(0, static_cast<int>(std::ceil(std::log2(opts.horizon * opts.c_h / eps) - 1e-12)));
  a.K = std::clamp(static_cast<int>(std::ceil(log_inv / opts.gamma_circ - 1e-12)), 1, std::max(1, opts.K_max));
  a.picard_steps = std::max(1, static_cast<int>(std::ceil(opts.c_M * log_inv - 1e-12)));

  std::vector<double> V(static_cast<std::size_t>(a.L) + 1);
  for (std::size_t l = 0; l < V.size(); ++l) {
    if (l < pilot_variances.size()) {
      V[l] = std::max(0.0, pilot_variances[l]);
    } else {
      V[l] = V[l - 1] * 0.25;
    }
  }
  double total = 0.0;
  for (std::size_t l = 0; l < V.size(); ++l) {
    const double h = opts.horizon * std::ldexp(1.0, -static_cast<int>(l));
    total += std::sqrt(V[l] / h);
  }
  a.N_per_level.resize(V.size());
  for (std::size_t l = 0; l < V.size(); ++l) {
    const double h = opts.horizon * std::ldexp(1.0, -static_cast<int>(l));
    const double n = 2.0 / (eps * eps) * std::sqrt(V[l] * h) * total;
    a.N_per_level[l] = std::max(std::max<std::size_t>(1, opts.min_samples), static_cast<std::size_t>(std::ceil(n)));
  }
  return a;
}

PilotResult pilot_variances(const GammaTable& frozen, const ProjectedModel& pm, int L, std::size_t n_pilot,
                            std::uint64_t seed, unsigned threads, Payoff payoff) {
  MultilevelRequest req;
  req.samples.assign(static_cast<std::size_t>(L) + 1, n_pilot);
  req.target_level = 0;
  req.payoff = payoff;
  req.seed = seed;
  req.picard_step = 0xFFFF0000u;
  req.threads = threads;
  const auto est = multilevel_estimate(frozen, pm, req);
  PilotResult out;
  for (const auto& lv : est.levels) {
    double v = 0.0;
    for (double c : lv.variance) v += c;
    out.variances.push_back(v);
  }
  out.cost = est.cost;
  return out;
}

MlmcGammaResult mlmc_gamma_estimate(const GammaTable& frozen, const LevelAllocation& alloc, const ProjectedModel& pm,
                                    int table_level, std::uint64_t seed, std::uint32_t picard_step, unsigned threads) {
  if (alloc.N_per_level.size() != static_cast<std::size_t>(alloc.L) + 1) {
    throw std::invalid_argument("mlmc_gamma_estimate: allocation needs L+1 sample sizes");
  }
  MultilevelRequest req;
  req.samples = alloc.N_per_level;
  req.target_level = table_level;
  req.payoff = Payoff::basis;
  req.seed = seed;
  req.picard_step = picard_step;
  req.threads = threads;
  auto est = multilevel_estimate(frozen, pm, req);
  MlmcGammaResult out{GammaTable(pm.max_order, est.grid, static_cast<int>(picard_step)), est.terminal_se,
                      std::move(est.levels), est.cost};
  for (int k = 0; k <= pm.max_order; ++k) {
    for (int j = 0; j < out.table.num_nodes(); ++j) out.table.at(k, j) = est.value(k, j);
  }
  return out;
}

GammaTable initial_table(const PicardConfig& cfg, const ProjectedModel& pm) {
  const TimeGrid grid = TimeGrid::dyadic(pm.horizon, cfg.table_level);
  const HermiteBasis basis(pm.max_order);
  std::vector<double> g;
  if (cfg.init == PicardInit::static_gaussian) {
    g = gaussian_expected_phi(cfg.init_mean, cfg.init_variance, pm.max_order, basis.rule());
  } else {
    g = initial_gamma(pm.initial, pm.max_order, basis.rule());
  }
  return GammaTable::constant(g, grid, 0);
}

PicardTables picard_tables(const PicardConfig& cfg, const ProjectedModel& pm, int count) {
  if (count < 1) throw std::invalid_argument("picard_tables: need at least one table");
  if (count > 1 && cfg.samples.empty()) throw std::invalid_argument("picard_tables: no sample sizes");
  PicardTables out;
  out.tables.push_back(initial_table(cfg, pm));
  out.terminal_se.emplace_back(static_cast<std::size_t>(pm.max_order) + 1, 0.0);
  const double limit = kHermiteFunctionBound + 1e-3;
  for (int m = 1; m < count; ++m) {
    LevelAllocation alloc;
    alloc.L = static_cast<int>(cfg.samples.size()) - 1;
    alloc.N_per_level = cfg.samples;
    auto step = mlmc_gamma_estimate(out.tables.back(), alloc, pm, cfg.table_level, cfg.seed,
                                    static_cast<std::uint32_t>(m), cfg.threads);
    const double worst = step.table.max_abs();
    if (!(worst <= limit)) {
      throw NumericalError("picard_run: unstable table at Picard step " + std::to_string(m) + ", max |gamma| = " +
                           std::to_string(worst) + " exceeds " + std::to_string(limit));
    }
    out.step_costs.push_back(step.cost);
    out.tables.push_back(std::move(step.table));
    out.terminal_se.push_back(std::move(step.terminal_se));
  }
  return out;
}

PicardResult picard_run(const PicardConfig& cfg, const ProjectedModel& pm) {
  if (cfg.picard_steps < 1) throw std::invalid_argument("picard_run: need at least one Picard step");
  if (cfg.samples.empty() && cfg.final_samples.empty()) throw std::invalid_argument("picard_run: no sample sizes");
  PicardResult res;
  auto tabs = picard_tables(cfg, pm, cfg.picard_steps);
  res.tables = std::move(tabs.tables);
  res.table_terminal_se = std::move(tabs.terminal_se);
  for (const auto& c : tabs.step_costs) {
    res.step_costs.push_back(c);
    res.cost += c;
  }

  MultilevelRequest req;
  req.samples = cfg.final_samples.empty() ? cfg.samples : cfg.final_samples;
  req.target_level = static_cast<int>(req.samples.size()) - 1;
  req.payoff = cfg.final_payoff;
  req.seed = cfg.seed;
  req.picard_step = static_cast<std::uint32_t>(cfg.picard_steps);
  req.threads = cfg.threads;
  const auto fin = multilevel_estimate(res.tables.back(), pm, req);
  res.payoff_grid = fin.grid;
  res.payoff_path.resize(static_cast<std::size_t>(fin.grid.num_steps()) + 1);
  for (int j = 0; j <= fin.grid.num_steps(); ++j) res.payoff_path[static_cast<std::size_t>(j)] = fin.value(0, j);
  res.estimate = res.payoff_path.back();
  res.standard_error = fin.terminal_se[0];
  res.step_costs.push_back(fin.cost);
  res.cost += fin.cost;
  return res;
}

RateTable rate_test(const GammaTable& frozen, const ProjectedModel& pm, std::span<const int> levels, std::size_t N,
                    std::uint64_t seed, std::uint32_t picard_step, unsigned threads) {
  if (levels.size() < 3) throw std::invalid_argument("rate_test: need at least three levels to fit");
  RateTable out;
  out.picard_step = static_cast<int>(picard_step);
  MultilevelRequest req;
  req.target_level = 0;
  req.payoff = Payoff::phi0;
  req.seed = seed;
  req.picard_step = picard_step;
  req.threads = threads;
  std::vector<double> ls, la, lb;
  for (int l : levels) {
    if (l < 1) throw std::invalid_argument("rate_test: levels must be >= 1");
    const auto pass = run_level(frozen, pm, l, N, true, req);
    RateRow row{l, std::abs(pass.stats.mean[0]), pass.stats.second_moment[0]};
    out.rows.push_back(row);
    ls.push_back(l);
    la.push_back(std::log2(row.a));
    lb.push_back(std::log2(row.b));
  }
  out.alpha_hat = -linear_fit(ls, la).slope;
  out.beta_hat = -linear_fit(ls, lb).slope;
  return out;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::ppm:
      return "ppm";
    case Method::mlmc:
      return "mlmc";
    case Method::chaos:
      return "chaos";
  }
  return "unknown";
}

std::vector<ComplexityRow> complexity_sweep(std::span<const Method> methods, std::span<const double> eps_list,
                                            std::span<const std::uint64_t> seeds, const KernelModel& model,
                                            const std::function<ProjectedModel(int)>& projector,
                                            const ComplexityOptions& opts) {
  if (seeds.empty()) throw std::invalid_argument("complexity_sweep: need at least one seed");
  double V = opts.payoff_variance;
  if (!(V > 0.0)) {
    SimulationConfig pilot;
    pilot.grid = TimeGrid::dyadic(model.horizon, 5);
    pilot.particles = std::max<std::size_t>(2, opts.pilot_samples);
    pilot.seed = seeds.front() ^ 0x5EEDu;
    pilot.threads = opts.threads;
    const auto pm = projector(10);
    const auto res = simulate(Engine::ppm, model, pm, pilot);
    V = sample_variance(res.terminal.states);
  }

  std::vector<ComplexityRow> rows;
  for (Method method : methods) {
    for (double eps : eps_list) {
      const double one = 1.0;
      const LevelAllocation shape = allocate_levels(eps, std::span<const double>(&one, 1), opts.alloc);
      const ProjectedModel pm = projector(shape.K);
      ComplexityRow row;
      row.method = method;
      row.epsilon = eps;
      row.K = shape.K;
      row.L = shape.L;
      double draws = 0.0, drifts = 0.0, sq = 0.0;
      for (std::size_t r = 0; r < seeds.size(); ++r) {
        const std::uint64_t seed = seeds[r];
        double estimate = 0.0;
        CostLedger cost;
        if (method == Method::mlmc) {
          PicardConfig pc;
          pc.table_level = shape.L;
          pc.seed = seed;
          pc.threads = opts.threads;
          const GammaTable d0 = initial_table(pc, pm);
          const auto pilot = pilot_variances(d0, pm, shape.L, opts.pilot_samples, seed, opts.threads);
          const auto alloc = allocate_levels(eps, pilot.variances, opts.alloc);
          pc.picard_steps = alloc.picard_steps;
          pc.samples = alloc.N_per_level;
          const auto res = picard_run(pc, pm);
          estimate = res.estimate;
          cost = res.cost;
          row.picard_steps = alloc.picard_steps;
          if (r == 0) row.particles = alloc.N_per_level.front();
        } else {
          SimulationConfig sc;
          sc.grid = TimeGrid::dyadic(model.horizon, shape.L);
          sc.particles = static_cast<std::size_t>(std::max(1.0, std::ceil(2.0 * V / (eps * eps))));
          sc.seed = seed;
          sc.threads = opts.threads;
          const auto res = simulate(method == Method::ppm ? Engine::ppm : Engine::chaos, model, pm, sc);
          estimate = mean(res.terminal.states);
          cost = res.cost;
          row.particles = sc.particles;
        }
        draws += static_cast<double>(cost.rng_draws());
        drifts += static_cast<double>(cost.drift_evals());
        sq += (estimate - opts.benchmark) * (estimate - opts.benchmark);
      }
      const double R = static_cast<double>(seeds.size());
      row.rng_draws = draws / R;
      row.drift_evals = drifts / R;
      row.mse = sq / R;
      rows.push_back(row);
    }
  }
  return rows;
}

LinearFit complexity_slope(std::span<const ComplexityRow> rows, Method method) {
  std::vector<double> x, y;
  for (const auto& r : rows) {
    if (r.method != method) continue;
    x.push_back(std::log(1.0 / r.epsilon));
    y.push_back(std::log(r.cost()));
  }
  return linear_fit(x, y);
}

}  // namespace mvsde
