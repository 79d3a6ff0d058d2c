#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace morph {

// Seeded random stream used by every stochastic component.
//
// The integer source is std::mt19937_64, whose output sequence for a given
// seed is fixed by the standard. All floating-point draws are derived from
// that sequence with the explicit transforms below (never through
// std::uniform_real_distribution / std::normal_distribution, whose results
// are implementation-defined), so a seed reproduces the same draw sequence
// on every build of this project.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Uniform double in [0, 1) with 53 bits of randomness.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Index in [0, n). Derived from uniform01; the ~2^-53 modulo bias is far
  // below anything observable here.
  std::uint64_t uniform_index(std::uint64_t n) {
    std::uint64_t i = static_cast<std::uint64_t>(uniform01() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  // Standard normal via the Marsaglia polar method. Pairs are generated
  // together; the spare value is consumed by the next call.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0.0, v = 0.0, s = 0.0;
    do {
      u = uniform(-1.0, 1.0);
      v = uniform(-1.0, 1.0);
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::uint64_t seed_ = 0;
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace morph
