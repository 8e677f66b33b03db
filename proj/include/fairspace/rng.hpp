#pragma once

#include <random>

#include "fairspace/common.hpp"

namespace fairspace {

/// Deterministic RNG. All randomized routines take an explicit seed and draw
/// through this wrapper only, so runs are reproducible across platforms with
/// the same libstdc++ mt19937_64 stream. uniform() and normal() avoid
/// std::uniform_real_distribution / std::normal_distribution because those
/// are not pinned by the standard.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  /// uniform in [0,1) with 53 random bits
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// standard normal via Box-Muller, one spare cached
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// uniform index in [0, n)
  int index(int n) {
    return static_cast<int>(static_cast<std::uint64_t>(uniform() * n) % static_cast<std::uint64_t>(n));
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fairspace
