#ifndef TRANSIO_RNG_HPP
#define TRANSIO_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace transio {

/// Seedable random source with fully specified output streams: mt19937_64
/// underneath, with uniform and normal variates generated by fixed formulas
/// so results are identical across standard library implementations.
/// split(tag) derives an independent deterministic substream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0,1) with 53 random bits.
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(uniform() * (hi - lo + 1));
  }

  /// Standard normal via Box-Muller (pairs cached).
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

  /// Independent substream derived from the base seed and a tag (splitmix64).
  Rng split(std::uint64_t tag) const {
    std::uint64_t x = seed_ ^ (tag + 0x9e3779b97f4a7c15ULL);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return Rng(x ^ (x >> 31));
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_ = 0;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace transio

#endif
