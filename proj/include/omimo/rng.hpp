// SPDX-License-Identifier: Apache-2.0
//
// Reproducible random streams for Monte-Carlo trials. Every draw path is fully
// specified here (no std::*_distribution), so a (seed, stream) pair produces
// the same numbers on every platform and under any worker count.

#ifndef OMIMO_RNG_HPP
#define OMIMO_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace omimo {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// One independent random stream, addressed by (seed, stream id). Trials use
// stream ids 1..num_trials; stream 0 is reserved for one-off draws such as a
// seeded channel realization.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t state = seed;
    (void)splitmix64(state);
    state ^= (stream + 1) * 0xA24BAED4963EE407ull;
    engine_.seed(splitmix64(state));
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; generates pairs and caches the spare.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(1.0 - uniform()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  // Circularly-symmetric complex Gaussian, zero mean, unit variance.
  std::complex<double> complex_gaussian() {
    const double re = normal();
    const double im = normal();
    return {re / std::numbers::sqrt2, im / std::numbers::sqrt2};
  }

  // Unit-magnitude complex number with uniform phase.
  std::complex<double> unit_phase() {
    return std::polar(1.0, 2.0 * std::numbers::pi * uniform());
  }

 private:
  std::mt19937_64 engine_;
  double spare_{0};
  bool has_spare_{false};
};

}  // namespace omimo

#endif  // OMIMO_RNG_HPP
