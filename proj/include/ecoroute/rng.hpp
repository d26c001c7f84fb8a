#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "ecoroute/stats.hpp"

namespace ecoroute {

/// Purpose tags mixed into derived seeds so that streams never overlap.
enum class Stream : std::uint64_t {
  run = 0x72756e,
  agent = 0x6167656e74,
  environment = 0x656e76,
  synth = 0x73796e7468,
  truth_mc = 0x7472757468,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stable hash of (master seed, purpose, tags...). Independent of call order,
/// thread scheduling and platform.
inline std::uint64_t derive_seed(std::uint64_t master, Stream purpose,
                                 std::initializer_list<std::uint64_t> tags = {}) {
  std::uint64_t h = splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(purpose)));
  for (const std::uint64_t tag : tags) {
    h = splitmix64(h ^ splitmix64(tag + 0x632be59bd9b4e019ULL));
  }
  return h;
}

/// Seeded random source.
///
/// Only the 64-bit Mersenne Twister engine is used directly; its output
/// sequence is fixed by the standard. Every distribution is implemented here
/// so draws are bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1) with 53 bits of resolution.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). Rejection keeps it unbiased.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) {
      throw InvalidInput("uniform_index: empty range");
    }
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t x = engine_();
      if (x >= threshold) {
        return x % n;
      }
    }
  }

  /// Standard normal draw by inversion of one uniform.
  double normal() { return stats::normal_quantile(uniform()); }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ecoroute
