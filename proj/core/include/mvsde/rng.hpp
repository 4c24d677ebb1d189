#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace mvsde {

enum class StreamPurpose : std::uint32_t { initial_draw = 0, increment = 1 };

/// Identifies one particle's random stream. Streams are stateless: every
/// draw is a pure function of the key and the draw index.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint32_t picard_step = 0;
  std::uint32_t level = 0;
  std::uint64_t particle_index = 0;
  StreamPurpose purpose = StreamPurpose::increment;
};

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key) noexcept;

/// SplitMix64 finaliser.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Philox key shared by all particles of one (seed, picard_step, level, purpose) family.
PhiloxKey family_key(std::uint64_t seed, std::uint32_t picard_step, std::uint32_t level,
                     StreamPurpose purpose) noexcept;

/// Standard normal quantile, -sqrt(2) erfc^{-1}(2p), for p in (0,1).
double normal_quantile(double p);

/// Two standard normals from block `block` of the particle's stream.
/// Normal number i of a stream lives in block i/2, slot i%2.
std::array<double, 2> normal_pair(const PhiloxKey& key, std::uint64_t particle_index,
                                  std::uint64_t block);

/// Random access: standard normal number `index` of the stream.
double normal_at(const StreamKey& key, std::uint64_t index);

/// `count` i.i.d. N(0, variance) draws, entries 0..count-1 of the stream.
std::vector<double> normal_increments(const StreamKey& key, std::size_t count, double variance);

/// out[j] = fine[2j] + fine[2j+1]. Throws std::invalid_argument on odd length.
std::vector<double> coarsen(std::span<const double> fine);

}  // namespace mvsde
