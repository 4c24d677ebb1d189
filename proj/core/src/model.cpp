#include "mvsde/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mvsde/error.hpp"

namespace mvsde {

std::vector<double> initial_gamma(const InitialLaw& law, int max_order, const QuadratureRule& rule) {
  if (const auto* pm = std::get_if<PointMass>(&law)) {
    std::vector<double> out(static_cast<std::size_t>(max_order) + 1);
    phi_all(pm->x0, out);
    return out;
  }
  const auto& g = std::get<GaussianLaw>(law);
  return gaussian_expected_phi(g.mean, g.variance, max_order, rule);
}

void KernelModel::validate() const {
  if (!drift_kernel || !diffusion_kernel) throw std::invalid_argument("KernelModel: both kernels must be set");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("KernelModel: horizon must be positive");
  if (const auto* g = std::get_if<GaussianLaw>(&initial); g && !(g->variance >= 0.0)) {
    throw std::invalid_argument("KernelModel: initial variance must be non-negative");
  }
  for (double x = -5.0; x <= 5.0; x += 0.5) {
    for (double y = -5.0; y <= 5.0; y += 0.5) {
      if (!std::isfinite(drift_kernel(x, y)) || !std::isfinite(diffusion_kernel(x, y))) {
        throw std::invalid_argument("KernelModel: kernel is not finite at (" + std::to_string(x) + ", " +
                                    std::to_string(y) + ")");
      }
    }
  }
}

KernelModel gaussian_interaction_model(double sigma, InitialLaw initial, double horizon, double width, double scale) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian_interaction_model: width must be positive");
  if (!(sigma >= 0.0)) throw std::invalid_argument("gaussian_interaction_model: sigma must be non-negative");
  KernelModel m;
  const double inv = 1.0 / (2.0 * width * width);
  m.drift_kernel = [inv, scale](double x, double y) { return scale * std::exp(-(x - y) * (x - y) * inv); };
  m.diffusion_kernel = [sigma](double, double) { return sigma; };
  m.diffusion_state = [sigma](double) { return sigma; };
  m.initial = initial;
  m.horizon = horizon;
  return m;
}

std::vector<double> ProjectedModel::alpha_values(double x) const {
  std::vector<double> out(static_cast<std::size_t>(max_order) + 1);
  alpha(x, out);
  return out;
}

std::vector<double> ProjectedModel::beta_values(double x) const {
  std::vector<double> out(static_cast<std::size_t>(max_order) + 1);
  beta(x, out);
  return out;
}

double ProjectedModel::drift(double x, std::span<const double> gamma, std::span<double> scratch) const {
  if (drift_state) return drift_state(x);
  alpha(x, scratch);
  double s = 0.0;
  for (int k = 0; k <= max_order; ++k) s += scratch[static_cast<std::size_t>(k)] * gamma[static_cast<std::size_t>(k)];
  return s;
}

double ProjectedModel::diffusion(double x, std::span<const double> gamma, std::span<double> scratch) const {
  if (diffusion_state) return diffusion_state(x);
  beta(x, scratch);
  double s = 0.0;
  for (int k = 0; k <= max_order; ++k) s += scratch[static_cast<std::size_t>(k)] * gamma[static_cast<std::size_t>(k)];
  return s;
}

namespace {

struct NodeTable {
  std::vector<double> nodes;
  std::vector<double> weighted_phi;  // Q x (K+1): sw_q phi_k(u_q)
  int dim = 0;
};

CoefficientFunction quadrature_coefficients(Kernel kernel, std::shared_ptr<const NodeTable> table, const char* name) {
  return [kernel = std::move(kernel), table, name](double x, std::span<double> out) {
    const auto dim = static_cast<std::size_t>(table->dim);
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(dim), 0.0);
    for (std::size_t q = 0; q < table->nodes.size(); ++q) {
      const double b = kernel(x, table->nodes[q]);
      if (!std::isfinite(b)) {
        throw NumericalError(std::string(name) + " kernel is not finite at x=" + std::to_string(x) +
                             ", u=" + std::to_string(table->nodes[q]));
      }
      const double* row = table->weighted_phi.data() + q * dim;
      for (std::size_t k = 0; k < dim; ++k) out[k] += b * row[k];
    }
  };
}

}  // namespace

ProjectedModel project_kernel(const KernelModel& model, const HermiteBasis& basis, int K) {
  if (K < 0) throw std::invalid_argument("project_kernel: K must be >= 0");
  if (K > basis.max_order()) throw std::invalid_argument("project_kernel: K exceeds basis max_order");
  if (!model.drift_kernel || !model.diffusion_kernel) throw std::invalid_argument("project_kernel: kernels must be set");

  const QuadratureRule& rule = basis.rule();
  auto table = std::make_shared<NodeTable>();
  table->dim = K + 1;
  table->nodes = rule.nodes;
  table->weighted_phi.resize(rule.size() * static_cast<std::size_t>(K + 1));
  std::vector<double> buf(static_cast<std::size_t>(K) + 1);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    phi_all(rule.nodes[q], buf);
    for (int k = 0; k <= K; ++k) {
      const double v = rule.scaled_weights[q] * buf[static_cast<std::size_t>(k)];
      if (!std::isfinite(v)) throw NumericalError("project_kernel: non-finite quadrature weight");
      table->weighted_phi[q * static_cast<std::size_t>(K + 1) + static_cast<std::size_t>(k)] = v;
    }
  }

  ProjectedModel pm;
  pm.max_order = K;
  pm.provenance = Provenance::quadrature;
  pm.quadrature_order = static_cast<int>(rule.size());
  pm.alpha = quadrature_coefficients(model.drift_kernel, table, "drift");
  pm.beta = quadrature_coefficients(model.diffusion_kernel, table, "diffusion");
  pm.drift_state = model.drift_state;
  pm.diffusion_state = model.diffusion_state;
  pm.initial = model.initial;
  pm.horizon = model.horizon;
  return pm;
}

double gaussian_alpha_closed_form(int n, double y) {
  if (n < 0) throw std::invalid_argument("gaussian_alpha_closed_form: n must be >= 0");
  const double quarter_pi = std::pow(std::numbers::pi, 0.25);
  if (n == 0) return quarter_pi * std::exp(-0.25 * y * y);
  if (y == 0.0) return 0.0;
  const double nd = static_cast<double>(n);
  const double log_mag = -0.5 * nd * std::numbers::ln2 + nd * std::log(std::abs(y)) - 0.5 * std::lgamma(nd + 1.0) -
                         0.25 * y * y;
  const double sign = (y < 0.0 && n % 2 == 1) ? -1.0 : 1.0;
  return sign * quarter_pi * std::exp(log_mag);
}

ProjectedModel gaussian_projected_model(double sigma, InitialLaw initial, double horizon, int K) {
  const HermiteBasis basis(K);
  ProjectedModel pm = project_kernel(gaussian_interaction_model(sigma, initial, horizon), basis, K);
  const double a0 = std::pow(std::numbers::pi, 0.25);
  pm.alpha = [K, a0](double y, std::span<double> out) {
    out[0] = a0 * std::exp(-0.25 * y * y);
    const double c = y / std::numbers::sqrt2;
    for (int k = 0; k < K; ++k) {
      out[static_cast<std::size_t>(k) + 1] = out[static_cast<std::size_t>(k)] * c / std::sqrt(k + 1.0);
    }
  };
  pm.provenance = Provenance::closed_form;
  return pm;
}

DecayFit fit_gamma_decay(std::span<const double> gamma, std::span<const double> se) {
  if (!se.empty() && se.size() != gamma.size()) throw std::invalid_argument("fit_gamma_decay: se size mismatch");
  std::size_t n = gamma.size();
  if (!se.empty()) {
    n = 0;
    for (std::size_t k = 0; k < gamma.size(); ++k) {
      if (std::abs(gamma[k]) > 3.0 * se[k]) n = k + 1;
    }
  }
  if (n < 3) throw std::invalid_argument("fit_gamma_decay: fewer than three resolved coefficients");

  std::vector<double> ks, env_log, raw_ks, raw_log;
  double running = 0.0;
  std::vector<double> envelope(n);
  for (std::size_t i = n; i-- > 0;) {
    running = std::max(running, std::abs(gamma[i]));
    envelope[i] = running;
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (envelope[k] > 0.0) {
      ks.push_back(static_cast<double>(k));
      env_log.push_back(std::log(envelope[k]));
    }
    if (gamma[k] != 0.0) {
      raw_ks.push_back(static_cast<double>(k));
      raw_log.push_back(std::log(std::abs(gamma[k])));
    }
  }
  if (ks.size() < 3) throw std::invalid_argument("fit_gamma_decay: coefficients vanish");
  DecayFit out;
  out.resolved = static_cast<int>(n);
  const LinearFit env = linear_fit(ks, env_log);
  out.gamma_circ = -env.slope;
  out.r_squared = env.r_squared;
  if (raw_ks.size() >= 2) {
    const LinearFit raw = linear_fit(raw_ks, raw_log);
    out.raw_gamma_circ = -raw.slope;
    out.raw_r_squared = raw.r_squared;
  }
  return out;
}

AssumptionReport assumption_diagnostics(const ProjectedModel& pm, std::span<const double> grid,
                                        std::span<const double> gamma, std::span<const double> gamma_se) {
  if (grid.empty()) throw std::invalid_argument("assumption_diagnostics: empty grid");
  const auto dim = static_cast<std::size_t>(pm.max_order) + 1;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  AssumptionReport rep;
  rep.alpha_growth.assign(dim, 0.0);
  rep.beta_growth.assign(dim, 0.0);
  std::vector<double> buf(dim);
  auto accumulate = [&](const CoefficientFunction& fn, std::vector<double>& growth, double x) {
    try {
      fn(x, buf);
    } catch (const NumericalError&) {
      std::fill(buf.begin(), buf.end(), nan);
    }
    for (std::size_t k = 0; k < dim; ++k) {
      const double v = std::abs(buf[k]) / (1.0 + std::abs(x));
      if (std::isnan(growth[k])) continue;
      growth[k] = std::isfinite(v) ? std::max(growth[k], v) : nan;
    }
  };
  for (double x : grid) {
    accumulate(pm.alpha, rep.alpha_growth, x);
    accumulate(pm.beta, rep.beta_growth, x);
  }
  rep.alpha_decreasing = true;
  for (std::size_t k = 0; k < dim; ++k) {
    rep.alpha_growth_sum += rep.alpha_growth[k];
    if (k > 0 && !(rep.alpha_growth[k] < rep.alpha_growth[k - 1])) rep.alpha_decreasing = false;
  }
  if (!gamma.empty()) {
    try {
      rep.decay = fit_gamma_decay(gamma, gamma_se);
    } catch (const std::invalid_argument&) {
      rep.decay.reset();
    }
  }
  return rep;
}

}  // namespace mvsde
