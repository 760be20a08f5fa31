#pragma once

#include <cmath>
#include <cstdint>

#include "qdepol/types.hpp"

namespace qdepol {

// xoshiro256++ with splitmix64 seeding. Self-contained so that streams are
// bit-reproducible across platforms and standard libraries; the std::
// distributions are implementation-defined and unusable for frozen seeds.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : s_) word = splitmix64(x);
  }

  /// Independent stream for a Monte-Carlo block: state derived from
  /// (seed, block index) only, never from worker identity.
  static Rng for_block(std::uint64_t seed, std::uint64_t block) {
    return Rng(seed ^ (0x9E3779B97F4A7C15ULL * (block + 1)));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in (0, 1]; never 0, safe under log().
  Real uniform01() {
    return static_cast<Real>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; second variate cached.
  Real normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const Real u1 = uniform01();
    const Real u2 = uniform01();
    const Real r = std::sqrt(-2.0 * std::log(u1));
    const Real theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  /// Centered Cauchy variate of half-width `scale` (inverse CDF).
  Real cauchy(Real scale) {
    return scale * std::tan(M_PI * (uniform01() - 0.5));
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t s_[4];
  Real spare_ = 0;
  bool have_spare_ = false;
};

}  // namespace qdepol
