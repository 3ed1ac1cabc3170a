#pragma once

#include <cmath>
#include <cstdint>

// Self-contained deterministic RNG for ensemble sampling. std::normal_distribution
// is implementation-defined, so reproducible streams are built from a SplitMix64
// generator plus the Marsaglia polar transform. Bit-exact reproducibility is
// promised within one build; across platforms the streams are statistically
// equivalent.

namespace egoe {

// SplitMix64 avalanche finalizer (Stafford/Vigna constants).
inline constexpr std::uint64_t splitmix_avalanche(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return splitmix_avalanche(state_);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Standard normal variates via the Marsaglia polar method.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : gen_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * gen_.uniform() - 1.0;
      v = 2.0 * gen_.uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  // Sum of `dof` squared standard normals.
  double chi_squared(int dof) {
    double acc = 0.0;
    for (int i = 0; i < dof; ++i) {
      const double x = next();
      acc += x * x;
    }
    return acc;
  }

  // Standard Cauchy variate (inverse CDF on the uniform stream).
  double cauchy() {
    double u;
    do {
      u = gen_.uniform();
    } while (u == 0.0);
    return std::tan(3.14159265358979323846 * (u - 0.5));
  }

  SplitMix64& raw() { return gen_; }

 private:
  SplitMix64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace egoe
