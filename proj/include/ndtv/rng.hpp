#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace ndtv {

// Counter-based pseudo-random generator (splitmix64 over an affine counter
// walk). Entry k of a stream is a pure function of (seed, k), so trials can be
// evaluated in any order or in parallel with identical results.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ull))) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t word(std::uint64_t counter) const {
    return mix(seed_ + counter * 0x9e3779b97f4a7c15ull);
  }

  // Sequential convenience interface.
  std::uint64_t next() { return word(counter_++); }

  double next_unit() {  // uniform in [0, 1)
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // Box-Muller; consumes two words per pair, caches the second draw.
  double next_gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = next_unit();
    double u2 = next_unit();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(t);
    have_cached_ = true;
    return r * std::cos(t);
  }

  std::complex<double> next_complex_gaussian() {
    const double re = next_gaussian();
    const double im = next_gaussian();
    return {re, im};
  }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    // Rejection-free modulo is fine here: n is tiny relative to 2^64.
    return next() % n;
  }

  double sign() { return (next() & 1u) ? 1.0 : -1.0; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

// Stable derivation of per-(cell, trial) seeds from a root seed.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
  std::uint64_t z = CounterRng::mix(root);
  z = CounterRng::mix(z ^ (a + 0x165667b19e3779f9ull));
  z = CounterRng::mix(z ^ (b + 0x27d4eb2f165667c5ull));
  z = CounterRng::mix(z ^ (c + 0x9e3779b97f4a7c15ull));
  return z;
}

}  // namespace ndtv
