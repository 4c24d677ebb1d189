#pragma once

#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "mvsde/basis.hpp"
#include "mvsde/stats.hpp"

namespace mvsde {

struct PointMass {
  double x0 = 0.5;
};

struct GaussianLaw {
  double mean = 0.0;
  double variance = 1.0;
};

using InitialLaw = std::variant<PointMass, GaussianLaw>;

/// E[phi_k(X_0)], k = 0..max_order.
std::vector<double> initial_gamma(const InitialLaw& law, int max_order, const QuadratureRule& rule);

using Kernel = std::function<double(double x, double y)>;
using StateFunction = std::function<double(double x)>;

/// dX = <b(X,.), mu_t> dt + <s(X,.), mu_t> dW.
///
/// When a kernel does not depend on its measure argument the matching
/// *_state function may be set. Steppers then use it directly instead of
/// the measure average, which is what keeps e.g. a constant sigma dW term
/// unprojected.
struct KernelModel {
  Kernel drift_kernel;
  Kernel diffusion_kernel;
  InitialLaw initial = PointMass{};
  double horizon = 1.0;
  StateFunction drift_state;
  StateFunction diffusion_state;

  /// Probes both kernels on [-5, 5]^2; throws std::invalid_argument when a
  /// kernel is missing or returns a non-finite value.
  void validate() const;
};

/// b(x,y) = scale * exp(-(x-y)^2 / (2 width^2)), s = sigma.
KernelModel gaussian_interaction_model(double sigma, InitialLaw initial, double horizon, double width = 1.0,
                                       double scale = 1.0);

enum class Provenance { closed_form, quadrature };

/// Writes the K+1 coefficient functions evaluated at x.
using CoefficientFunction = std::function<void(double x, std::span<double> out)>;

/// Projected coefficients alpha_k(x) = int b(x,u) phi_k(u) du and likewise beta_k.
struct ProjectedModel {
  int max_order = 0;
  Provenance provenance = Provenance::quadrature;
  int quadrature_order = 0;
  CoefficientFunction alpha;
  CoefficientFunction beta;
  StateFunction drift_state;
  StateFunction diffusion_state;
  InitialLaw initial = PointMass{};
  double horizon = 1.0;

  std::vector<double> alpha_values(double x) const;
  std::vector<double> beta_values(double x) const;

  /// Number of drift evaluations one call of drift() is charged for.
  int drift_cost() const noexcept { return drift_state ? 1 : max_order + 1; }

  /// sum_k alpha_k(x) gamma_k, or drift_state(x). scratch needs K+1 slots.
  double drift(double x, std::span<const double> gamma, std::span<double> scratch) const;
  double diffusion(double x, std::span<const double> gamma, std::span<double> scratch) const;
};

/// Gauss-Hermite projection of both kernels onto phi_0..phi_K.
/// Throws std::invalid_argument for K > basis.max_order(); evaluations throw
/// NumericalError when a kernel returns a non-finite value at a node.
ProjectedModel project_kernel(const KernelModel& model, const HermiteBasis& basis, int K);

/// pi^{1/4} 2^{-n/2} y^n / sqrt(n!) exp(-y^2/4): projection of exp(-(x-u)^2/2) onto phi_n at x = y.
double gaussian_alpha_closed_form(int n, double y);

/// Model with the unit Gaussian drift kernel and constant sigma, with
/// closed-form alpha_k. beta_k still comes from quadrature.
ProjectedModel gaussian_projected_model(double sigma, InitialLaw initial, double horizon, int K);

struct DecayFit {
  double gamma_circ = 0.0;       // decay rate fitted to the tail envelope
  double r_squared = 0.0;
  double raw_gamma_circ = 0.0;   // same fit on log|gamma_k| directly
  double raw_r_squared = 0.0;
  int resolved = 0;              // number of leading coefficients used
};

/// Fits log sup_{j>=k} |gamma_j| ~ c - gamma_circ * k over the resolved
/// range: k up to the last coefficient whose magnitude exceeds 3 standard
/// errors (all coefficients when se is empty). Needs three resolved entries.
DecayFit fit_gamma_decay(std::span<const double> gamma, std::span<const double> se = {});

struct AssumptionReport {
  std::vector<double> alpha_growth;  // sup_x |alpha_k(x)| / (1 + |x|)
  std::vector<double> beta_growth;
  bool alpha_decreasing = false;
  double alpha_growth_sum = 0.0;
  std::optional<DecayFit> decay;
};

/// Grid diagnostics for the growth and summability assumptions on alpha and
/// beta, plus the coefficient decay fit when gamma is supplied. Non-finite
/// values are reported as NaN rather than thrown.
AssumptionReport assumption_diagnostics(const ProjectedModel& pm, std::span<const double> grid,
                                        std::span<const double> gamma = {}, std::span<const double> gamma_se = {});

}  // namespace mvsde
