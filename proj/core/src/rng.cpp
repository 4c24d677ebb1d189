#include "mvsde/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

namespace mvsde {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// 53-bit uniform strictly inside (0,1).
inline double to_open_unit(std::uint32_t a, std::uint32_t b) noexcept {
  const std::uint64_t bits = (static_cast<std::uint64_t>(a >> 5) << 26) | (b >> 6);
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

PhiloxKey family_key(std::uint64_t seed, std::uint32_t picard_step, std::uint32_t level,
                     StreamPurpose purpose) noexcept {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ picard_step);
  h = splitmix64(h ^ level);
  h = splitmix64(h ^ static_cast<std::uint32_t>(purpose));
  return {static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
}

double normal_quantile(double p) { return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p); }

std::array<double, 2> normal_pair(const PhiloxKey& key, std::uint64_t particle_index,
                                  std::uint64_t block) {
  const PhiloxCounter ctr{static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                          static_cast<std::uint32_t>(particle_index),
                          static_cast<std::uint32_t>(particle_index >> 32)};
  const PhiloxCounter r = philox4x32(ctr, key);
  return {normal_quantile(to_open_unit(r[0], r[1])), normal_quantile(to_open_unit(r[2], r[3]))};
}

double normal_at(const StreamKey& key, std::uint64_t index) {
  const auto fk = family_key(key.seed, key.picard_step, key.level, key.purpose);
  return normal_pair(fk, key.particle_index, index / 2)[index % 2];
}

std::vector<double> normal_increments(const StreamKey& key, std::size_t count, double variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("normal_increments: variance must be positive");
  const auto fk = family_key(key.seed, key.picard_step, key.level, key.purpose);
  const double sd = std::sqrt(variance);
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; i += 2) {
    const auto z = normal_pair(fk, key.particle_index, i / 2);
    out[i] = sd * z[0];
    if (i + 1 < count) out[i + 1] = sd * z[1];
  }
  return out;
}

std::vector<double> coarsen(std::span<const double> fine) {
  if (fine.size() % 2 != 0) throw std::invalid_argument("coarsen: odd number of fine increments");
  std::vector<double> out(fine.size() / 2);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = fine[2 * j] + fine[2 * j + 1];
  return out;
}

}  // namespace mvsde
