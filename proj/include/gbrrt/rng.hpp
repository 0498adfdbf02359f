#pragma once

#include <cstdint>
#include <random>

namespace gbrrt {

/// splitmix64 finalizer, used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic random stream. The draw helpers are written out by hand so
/// that sequences do not depend on the standard library's distribution code.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(splitmix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi). Returns lo when lo == hi.
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform index in [0, n). n must be positive.
  std::uint64_t index(std::uint64_t n) {
    // Rejection sampling keeps the draw unbiased.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r = engine_();
    while (r >= limit) r = engine_();
    return r % n;
  }

 private:
  std::mt19937_64 engine_;
};

/// The two streams a planner run consumes. The forward stream drives every
/// forward-tree decision (c_rand, sampling, control and duration draws); the
/// reverse stream drives reverse-tree growth. Both derive from the run seed.
struct RunStreams {
  Rng forward;
  Rng reverse;

  explicit RunStreams(std::uint64_t seed)
      : forward(splitmix64(seed ^ 0x5f0f0f0f0f0f0f0fULL)),
        reverse(splitmix64(seed ^ 0xa0f0f0f0f0f0f0f0ULL)) {}
};

}  // namespace gbrrt
