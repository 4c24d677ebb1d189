#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace mvsde {

/// Work is always cut into blocks of this many items, whatever the thread count.
inline constexpr std::size_t kBlockSize = 256;

inline std::size_t block_count(std::size_t n) noexcept { return (n + kBlockSize - 1) / kBlockSize; }

/// Calls fn(begin, end, block) for every block of [0, n). Blocks are claimed
/// dynamically by up to `threads` workers; the first exception is rethrown.
template <class F>
void parallel_for_blocks(std::size_t n, unsigned threads, F&& fn) {
  const std::size_t blocks = block_count(n);
  auto run_block = [&](std::size_t b) {
    const std::size_t begin = b * kBlockSize;
    fn(begin, std::min(n, begin + kBlockSize), b);
  };
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), blocks));
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) run_block(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t b = next.fetch_add(1); b < blocks; b = next.fetch_add(1)) {
          try {
            run_block(b);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next.store(blocks);
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

/// In-place pairwise tree sum over equal-length partial vectors; the result
/// lands in parts[0]. Order depends only on parts.size().
void pairwise_combine(std::vector<std::vector<double>>& parts);

/// Deterministic vector-valued reduction over [0, n).
/// fn(begin, end, acc) adds its block's contribution into acc (length dim,
/// zero-initialised). Block partials are combined by pairwise_combine, so
/// the result is bit-identical for every thread count.
template <class F>
std::vector<double> blocked_sum(std::size_t n, std::size_t dim, unsigned threads, F&& fn) {
  std::vector<std::vector<double>> parts(std::max<std::size_t>(1, block_count(n)),
                                         std::vector<double>(dim, 0.0));
  parallel_for_blocks(n, threads, [&](std::size_t begin, std::size_t end, std::size_t b) {
    fn(begin, end, std::span<double>(parts[b]));
  });
  pairwise_combine(parts);
  return std::move(parts[0]);
}

}  // namespace mvsde
