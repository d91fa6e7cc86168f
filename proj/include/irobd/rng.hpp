#pragma once

#include <cmath>
#include <cstdint>

#include "irobd/types.hpp"

namespace irobd {

/// Small deterministic generator (splitmix64 core) so seeded artifacts are
/// byte-identical across runs and standard-library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next() % static_cast<uint64_t>(hi - lo + 1));
  }

  double normal() {
    // Box-Muller; one draw per call keeps the stream simple to reason about.
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  Vec normal_vec(int d) {
    Vec x(d);
    for (int i = 0; i < d; ++i) x[i] = normal();
    return x;
  }

  Vec uniform_vec(int d, double lo, double hi) {
    Vec x(d);
    for (int i = 0; i < d; ++i) x[i] = uniform(lo, hi);
    return x;
  }

 private:
  uint64_t state_;
};

}  // namespace irobd
