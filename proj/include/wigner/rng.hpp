#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace wigner::rng {

// Finalizer from the splitmix64 generator. Bijective, so distinct inputs
// never collide.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Seed for the stream that drives one Monte Carlo sample. Two mixing rounds
// keep streams of neighbouring sample indices decorrelated. Every consumer
// of (master seed, sample index) pairs must go through this function so that
// results do not depend on worker count or scheduling.
inline std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t sample_index) {
  return mix64(mix64(master_seed) ^ mix64(sample_index + 0x51ed2701ab0e3c5full));
}

// Random stream with exactly specified output. mt19937_64 is pinned by the
// standard, and the uniform and normal transforms are spelled out here
// because the std::*_distribution algorithms are implementation defined and
// would break byte-level reproducibility across standard libraries.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on [-half_width, half_width].
  double uniform_symmetric(double half_width) {
    return half_width * (2.0 * uniform01() - 1.0);
  }

  // Standard normal via the Box-Muller transform, one spare value cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    // log1p(-u1) is finite because u1 < 1 exactly.
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace wigner::rng
