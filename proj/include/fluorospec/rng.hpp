#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace fluorospec::rng {

// Reproducibility contract, fixed once:
//  * per-trajectory stream seed = splitmix64(seed + (index + 1) * 0x9E3779B97F4A7C15)
//  * engine = std::mt19937_64 (its output sequence is specified by the standard)
//  * uniforms in [0, 1) = (engine() >> 11) * 2^-53
//  * normals by the Marsaglia polar method on those uniforms
// Parallel scheduling cannot reorder randomness because streams depend only on
// (seed, trajectory index).

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed + index * 0x9E3779B97F4A7C15ULL);
}

class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t index) : eng_(stream_seed(seed, index)) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double next() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    cached_ = v * f;
    has_cached_ = true;
    return u * f;
  }

 private:
  std::mt19937_64 eng_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace fluorospec::rng
