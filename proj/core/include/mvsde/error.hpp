#pragma once

#include <stdexcept>
#include <string>

namespace mvsde {

/// Raised when a simulation leaves the representable range (NaN/Inf states,
/// unstable coefficient tables, non-convergent quadrature).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mvsde
