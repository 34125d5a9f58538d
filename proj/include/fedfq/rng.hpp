#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace fedfq {

/// Deterministic splitmix64 stream. Every stochastic operation in the library
/// takes one of these explicitly; there is no global RNG state. Child streams
/// derived via split() are keyed by caller-chosen tags so results do not
/// depend on scheduling or call order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53-bit resolution.
  double next_u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_u01() < p; }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint32_t below(std::uint32_t n) {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Standard normal via Box-Muller. Draws two values per call.
  double normal() {
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0,1]
    double u2 = next_u01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Derives an independent child stream keyed by up to three tags.
  Rng split(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const {
    std::uint64_t s = state_;
    s = mix(s ^ (a + 0x9e3779b97f4a7c15ull));
    s = mix(s ^ (b + 0xbf58476d1ce4e5b9ull));
    s = mix(s ^ (c + 0x94d049bb133111ebull));
    return Rng(s);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdull;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ull;
    return z ^ (z >> 33);
  }

  std::uint64_t state_;
};

}  // namespace fedfq
