#pragma once

#include <cstdint>

namespace mvsde {

/// Platform-independent operation counts. Counters only ever grow.
class CostLedger {
 public:
  void add_rng_draws(std::uint64_t n) noexcept { rng_draws_ += n; }
  void add_drift_evals(std::uint64_t n) noexcept { drift_evals_ += n; }
  void add_basis_evals(std::uint64_t n) noexcept { basis_evals_ += n; }

  std::uint64_t rng_draws() const noexcept { return rng_draws_; }
  std::uint64_t drift_evals() const noexcept { return drift_evals_; }
  std::uint64_t basis_evals() const noexcept { return basis_evals_; }

  /// Cost measure used by the complexity experiments: random draws plus drift evaluations.
  std::uint64_t total() const noexcept { return rng_draws_ + drift_evals_; }

  CostLedger& operator+=(const CostLedger& o) noexcept {
    rng_draws_ += o.rng_draws_;
    drift_evals_ += o.drift_evals_;
    basis_evals_ += o.basis_evals_;
    return *this;
  }

 private:
  std::uint64_t rng_draws_ = 0;
  std::uint64_t drift_evals_ = 0;
  std::uint64_t basis_evals_ = 0;
};

}  // namespace mvsde
