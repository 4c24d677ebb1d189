#pragma once

#include <span>

namespace mvsde {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = intercept + slope * x. Needs at least two
/// distinct x values.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> v);

/// Unbiased sample variance; zero for fewer than two values.
double sample_variance(std::span<const double> v);

}  // namespace mvsde
