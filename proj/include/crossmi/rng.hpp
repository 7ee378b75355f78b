#pragma once

#include <cmath>
#include <cstdint>

namespace crossmi {

// SplitMix64 mixing step. Used both as a PRNG stream and as a stateless
// counter hash so that per-point/per-replicate randomness does not depend
// on evaluation order (required for thread-count-independent results).
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Deterministic hash of (seed, a, b); every draw keyed this way is
// independent of loop ordering and parallel schedule.
inline std::uint64_t hash_mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t s = seed;
  std::uint64_t h = splitmix64_next(s);
  s = h ^ (a + 0x9e3779b97f4a7c15ull);
  h = splitmix64_next(s);
  s = h ^ (b + 0xd1b54a32d192ed03ull);
  return splitmix64_next(s);
}

// Small deterministic PRNG. We avoid std::*_distribution on purpose: their
// output is implementation-defined, and generated fixtures must be
// byte-identical across reruns.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  // uniform in [0, 1)
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform in (0, 1]
  double uniform01_open_low() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    // multiply-shift; bias is negligible for the n used here (< 2^32)
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // standard normal via Box-Muller, second value cached
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform01_open_low();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace crossmi
