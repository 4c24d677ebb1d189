#include "mvsde/parallel.hpp"

namespace mvsde {

void pairwise_combine(std::vector<std::vector<double>>& parts) {
  for (std::size_t stride = 1; stride < parts.size(); stride *= 2) {
    for (std::size_t i = 0; i + stride < parts.size(); i += 2 * stride) {
      auto& dst = parts[i];
      const auto& src = parts[i + stride];
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
    }
  }
}

}  // namespace mvsde
