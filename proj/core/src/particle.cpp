#include "mvsde/particle.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mvsde/basis.hpp"
#include "mvsde/error.hpp"
#include "mvsde/parallel.hpp"
#include "mvsde/rng.hpp"

namespace mvsde {
namespace {

void check_finite(double x, std::size_t particle, int step) {
  if (!std::isfinite(x)) {
    throw NumericalError("non-finite state for particle " + std::to_string(particle) + " at step " +
                         std::to_string(step));
  }
}

// Fills dW for step s from each particle's increment stream; odd steps reuse
// the second normal of the block drawn at the preceding even step.
class IncrementSource {
 public:
  IncrementSource(std::uint64_t seed, std::uint32_t picard_step, std::uint32_t level, std::uint64_t first,
                  std::size_t n, double h)
      : key_(family_key(seed, picard_step, level, StreamPurpose::increment)),
        first_(first),
        sd_(std::sqrt(h)),
        pending_(n) {}

  void fill(int step, std::span<double> dW, unsigned threads) {
    if (step % 2 == 0) {
      parallel_for_blocks(dW.size(), threads, [&](std::size_t b, std::size_t e, std::size_t) {
        for (std::size_t i = b; i < e; ++i) {
          const auto z = normal_pair(key_, first_ + i, static_cast<std::uint64_t>(step / 2));
          dW[i] = sd_ * z[0];
          pending_[i] = sd_ * z[1];
        }
      });
    } else {
      std::copy(pending_.begin(), pending_.end(), dW.begin());
    }
  }

 private:
  PhiloxKey key_;
  std::uint64_t first_;
  double sd_;
  std::vector<double> pending_;
};

}  // namespace

GammaSnapshot empirical_gamma(std::span<const double> states, int K, unsigned threads) {
  if (states.empty()) throw std::invalid_argument("empirical_gamma: empty ensemble");
  const auto dim = static_cast<std::size_t>(K) + 1;
  auto sums = blocked_sum(states.size(), dim, threads, [&](std::size_t b, std::size_t e, std::span<double> acc) {
    std::vector<double> buf(dim);
    for (std::size_t i = b; i < e; ++i) {
      phi_all(states[i], buf);
      for (std::size_t k = 0; k < dim; ++k) acc[k] += buf[k];
    }
  });
  const double n = static_cast<double>(states.size());
  for (auto& v : sums) v /= n;
  return {std::move(sums)};
}

GammaEstimate empirical_gamma_with_se(std::span<const double> states, int K, unsigned threads) {
  if (states.empty()) throw std::invalid_argument("empirical_gamma_with_se: empty ensemble");
  const auto dim = static_cast<std::size_t>(K) + 1;
  auto sums = blocked_sum(states.size(), 2 * dim, threads, [&](std::size_t b, std::size_t e, std::span<double> acc) {
    std::vector<double> buf(dim);
    for (std::size_t i = b; i < e; ++i) {
      phi_all(states[i], buf);
      for (std::size_t k = 0; k < dim; ++k) {
        acc[k] += buf[k];
        acc[dim + k] += buf[k] * buf[k];
      }
    }
  });
  const double n = static_cast<double>(states.size());
  GammaEstimate out;
  out.mean.resize(dim);
  out.se.resize(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    const double m = sums[k] / n;
    const double var = n > 1.0 ? std::max(0.0, (sums[dim + k] - n * m * m) / (n - 1.0)) : 0.0;
    out.mean[k] = m;
    out.se[k] = std::sqrt(var / n);
  }
  return out;
}

ParticleEnsemble chaos_step(const ParticleEnsemble& ens, const KernelModel& model, std::span<const double> dW,
                            double h, CostLedger& cost, unsigned threads) {
  const std::size_t n = ens.size();
  if (dW.size() != n) throw std::invalid_argument("chaos_step: dW size mismatch");
  ParticleEnsemble next = ens;
  ++next.time_index;
  const double inv_n = 1.0 / static_cast<double>(n);
  const auto& x = ens.states;
  parallel_for_blocks(n, threads, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t i = b; i < e; ++i) {
      double drift = 0.0;
      for (std::size_t j = 0; j < n; ++j) drift += model.drift_kernel(x[i], x[j]);
      drift *= inv_n;
      double diff;
      if (model.diffusion_state) {
        diff = model.diffusion_state(x[i]);
      } else {
        diff = 0.0;
        for (std::size_t j = 0; j < n; ++j) diff += model.diffusion_kernel(x[i], x[j]);
        diff *= inv_n;
      }
      const double y = x[i] + drift * h + diff * dW[i];
      check_finite(y, i, ens.time_index);
      next.states[i] = y;
    }
  });
  cost.add_drift_evals(static_cast<std::uint64_t>(n) * n);
  return next;
}

std::pair<ParticleEnsemble, GammaSnapshot> ppm_step(const ParticleEnsemble& ens, const ProjectedModel& pm,
                                                    std::span<const double> dW, double h, CostLedger& cost,
                                                    unsigned threads) {
  const std::size_t n = ens.size();
  if (dW.size() != n) throw std::invalid_argument("ppm_step: dW size mismatch");
  GammaSnapshot snap = empirical_gamma(ens.states, pm.max_order, threads);
  ParticleEnsemble next = ens;
  ++next.time_index;
  const auto dim = static_cast<std::size_t>(pm.max_order) + 1;
  const auto& x = ens.states;
  parallel_for_blocks(n, threads, [&](std::size_t b, std::size_t e, std::size_t) {
    std::vector<double> scratch(dim);
    for (std::size_t i = b; i < e; ++i) {
      const double drift = pm.drift(x[i], snap.values, scratch);
      const double diff = pm.diffusion(x[i], snap.values, scratch);
      const double y = x[i] + drift * h + diff * dW[i];
      check_finite(y, i, ens.time_index);
      next.states[i] = y;
    }
  });
  cost.add_drift_evals(static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(pm.drift_cost()));
  cost.add_basis_evals(static_cast<std::uint64_t>(n) * dim);
  return {std::move(next), std::move(snap)};
}

std::uint32_t simulation_level_tag(const TimeGrid& grid) noexcept {
  return grid.is_dyadic() ? static_cast<std::uint32_t>(grid.level())
                          : (0x80000000u | static_cast<std::uint32_t>(grid.num_steps()));
}

ParticleEnsemble initial_ensemble(const InitialLaw& law, std::size_t N, std::uint64_t seed, std::uint32_t picard_step,
                                  std::uint32_t level_tag, CostLedger& cost) {
  if (N == 0) throw std::invalid_argument("initial_ensemble: need at least one particle");
  ParticleEnsemble ens;
  ens.states.resize(N);
  if (const auto* pm = std::get_if<PointMass>(&law)) {
    std::fill(ens.states.begin(), ens.states.end(), pm->x0);
    return ens;
  }
  const auto& g = std::get<GaussianLaw>(law);
  const auto key = family_key(seed, picard_step, level_tag, StreamPurpose::initial_draw);
  const double sd = std::sqrt(g.variance);
  for (std::size_t i = 0; i < N; ++i) ens.states[i] = g.mean + sd * normal_pair(key, i, 0)[0];
  cost.add_rng_draws(N);
  return ens;
}

SimulationResult simulate(Engine engine, const KernelModel& model, const ProjectedModel& pm,
                          const SimulationConfig& cfg) {
  if (cfg.particles == 0) throw std::invalid_argument("simulate: need at least one particle");
  if (engine == Engine::chaos) model.validate();
  const TimeGrid& grid = cfg.grid;
  const std::uint32_t tag = simulation_level_tag(grid);
  const int K = pm.max_order;

  SimulationResult res{ParticleEnsemble{}, GammaTable(K, grid, 0), CostLedger{}, {}, {}};
  const InitialLaw& law = engine == Engine::chaos ? model.initial : pm.initial;
  ParticleEnsemble ens = initial_ensemble(law, cfg.particles, cfg.seed, 0, tag, res.cost);
  ens.level = grid.level();

  IncrementSource source(cfg.seed, 0, tag, ens.first_particle, cfg.particles, grid.step());
  std::vector<double> dW(cfg.particles);
  const double h = grid.step();
  const auto record = [&res](const ParticleEnsemble& e) {
    res.path_mean.push_back(mean(e.states));
    res.path_variance.push_back(sample_variance(e.states));
  };
  for (int s = 0; s < grid.num_steps(); ++s) {
    record(ens);
    source.fill(s, dW, cfg.threads);
    res.cost.add_rng_draws(cfg.particles);
    if (engine == Engine::chaos) {
      res.gamma.set_column(s, empirical_gamma(ens.states, K, cfg.threads).values);
      ens = chaos_step(ens, model, dW, h, res.cost, cfg.threads);
    } else {
      auto [next, snap] = ppm_step(ens, pm, dW, h, res.cost, cfg.threads);
      res.gamma.set_column(s, snap.values);
      ens = std::move(next);
    }
  }
  res.gamma.set_column(grid.num_steps(), empirical_gamma(ens.states, K, cfg.threads).values);
  record(ens);
  res.terminal = std::move(ens);
  return res;
}

double rms_difference(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("rms_difference: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

namespace {

struct TimedRun {
  SimulationResult result;
  double seconds;
};

TimedRun timed_simulate(Engine engine, const KernelModel& model, const ProjectedModel& pm,
                        const SimulationConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  auto res = simulate(engine, model, pm, cfg);
  const auto t1 = std::chrono::steady_clock::now();
  return {std::move(res), std::chrono::duration<double>(t1 - t0).count()};
}

StrongErrorRow compare(const TimedRun& chaos, const TimedRun& ppm, int K) {
  StrongErrorRow row;
  row.K = K;
  row.error = rms_difference(chaos.result.terminal.states, ppm.result.terminal.states);
  row.cost_gain = static_cast<double>(chaos.result.cost.total()) - static_cast<double>(ppm.result.cost.total());
  row.time_gain_seconds = chaos.seconds - ppm.seconds;
  return row;
}

}  // namespace

StrongErrorRow strong_error(const KernelModel& model, const ProjectedModel& pm, const SimulationConfig& cfg) {
  const auto chaos = timed_simulate(Engine::chaos, model, pm, cfg);
  const auto ppm = timed_simulate(Engine::ppm, model, pm, cfg);
  return compare(chaos, ppm, pm.max_order);
}

StrongErrorSweep strong_error_sweep(const KernelModel& model, const std::function<ProjectedModel(int)>& projector,
                                    std::span<const int> Ks, const SimulationConfig& cfg) {
  if (Ks.empty()) throw std::invalid_argument("strong_error_sweep: empty K range");
  StrongErrorSweep sweep;
  const ProjectedModel first = projector(Ks.front());
  const auto chaos = timed_simulate(Engine::chaos, model, first, cfg);
  for (int K : Ks) {
    const ProjectedModel pm = projector(K);
    const auto ppm = timed_simulate(Engine::ppm, model, pm, cfg);
    sweep.rows.push_back(compare(chaos, ppm, K));
  }
  if (sweep.rows.size() >= 2) {
    std::vector<double> ks, le;
    for (const auto& r : sweep.rows) {
      if (r.error > 0.0) {
        ks.push_back(r.K);
        le.push_back(std::log(r.error));
      }
    }
    if (ks.size() >= 2) sweep.fit = linear_fit(ks, le);
  }
  return sweep;
}

}  // namespace mvsde
