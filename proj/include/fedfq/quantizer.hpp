#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <variant>
#include <vector>

#include "fedfq/bit_allocation.hpp"
#include "fedfq/dense_vector.hpp"
#include "fedfq/rng.hpp"

namespace fedfq::quant {

/// Stochastically quantized update. Each element is reduced to a sign and an
/// integer level on a uniform grid of s = 2^(b-1) steps, scaled by the full
/// vector's l2 norm. Elements with a zero bit width carry nothing and
/// dequantize to 0.
struct QuantizedUpdate {
  enum class Kind : std::uint8_t { kUniform = 0, kMixed = 1 };

  Kind kind = Kind::kUniform;
  std::uint8_t uniform_bits = 0;         // set when kind == kUniform
  std::vector<std::uint8_t> mixed_bits;  // set when kind == kMixed
  float norm = 0.0f;
  std::vector<std::uint8_t> signs;   // 0 = +, 1 = -
  std::vector<std::uint8_t> levels;  // level_j in [0, 2^(b_j - 1)]

  std::uint32_t size() const { return static_cast<std::uint32_t>(signs.size()); }

  std::uint8_t bits_of(std::size_t j) const {
    return kind == Kind::kUniform ? uniform_bits : mixed_bits[j];
  }

  /// Sign+level bits across all elements (the codec payload).
  std::uint64_t payload_bits() const {
    if (kind == Kind::kUniform) {
      return static_cast<std::uint64_t>(uniform_bits) * size();
    }
    std::uint64_t total = 0;
    for (std::uint8_t b : mixed_bits) total += b;
    return total;
  }

  bool operator==(const QuantizedUpdate&) const = default;
};

struct Uniform {
  int bits = 8;
};
struct Mixed {
  BitAllocation alloc;
};
using Scheme = std::variant<Uniform, Mixed>;

namespace detail {

/// Quantizes one element against the shared norm. Consumes exactly one
/// uniform draw so that matched seeds line up across schemes.
inline std::uint8_t quantize_element(float value, double norm, int level_count,
                                     Rng& rng) {
  double r = norm > 0.0 ? std::abs(static_cast<double>(value)) / norm : 0.0;
  r = std::min(r, 1.0);
  double rs = r * level_count;
  double base = std::floor(rs);
  double frac = rs - base;
  std::uint32_t level =
      static_cast<std::uint32_t>(base) + (rng.next_u01() < frac ? 1u : 0u);
  level = std::min(level, static_cast<std::uint32_t>(level_count));
  return static_cast<std::uint8_t>(level);
}

}  // namespace detail

/// Random uniform quantization: sign, plus stochastic rounding of
/// |h_j|/||h||_2 onto the grid {0, 1/s, ..., s/s} with s = 2^(bits-1).
/// Unbiased: the expected dequantized value equals h elementwise.
inline QuantizedUpdate quantize_uniform(const DenseVector& h, int bits, Rng& rng) {
  require_finite(h, "quantize_uniform");
  if (bits < 1 || bits > 8) {
    throw std::invalid_argument("quantize_uniform: bits must be in [1, 8]");
  }
  const double norm = l2_norm(h);
  const int s = 1 << (bits - 1);

  QuantizedUpdate q;
  q.kind = QuantizedUpdate::Kind::kUniform;
  q.uniform_bits = static_cast<std::uint8_t>(bits);
  q.norm = static_cast<float>(norm);
  q.signs.resize(h.size());
  q.levels.resize(h.size());
  for (std::size_t j = 0; j < h.size(); ++j) {
    q.signs[j] = h[j] < 0.0f ? 1 : 0;  // sign(0) fixed as +
    q.levels[j] = norm > 0.0 ? detail::quantize_element(h[j], norm, s, rng) : 0;
  }
  return q;
}

/// Per-element bit widths against the shared full-vector norm. Zero-bit
/// elements are dropped: canonical sign +, level 0, no randomness consumed.
inline QuantizedUpdate quantize_mixed(const DenseVector& h,
                                      const BitAllocation& alloc, Rng& rng) {
  require_finite(h, "quantize_mixed");
  alloc.validate();
  if (alloc.bits.size() != h.size()) {
    throw std::invalid_argument("quantize_mixed: allocation length mismatch");
  }
  const double norm = l2_norm(h);

  QuantizedUpdate q;
  q.kind = QuantizedUpdate::Kind::kMixed;
  q.mixed_bits = alloc.bits;
  q.norm = static_cast<float>(norm);
  q.signs.resize(h.size());
  q.levels.resize(h.size());
  for (std::size_t j = 0; j < h.size(); ++j) {
    const std::uint8_t b = alloc.bits[j];
    if (b == 0) {
      q.signs[j] = 0;
      q.levels[j] = 0;
      continue;
    }
    q.signs[j] = h[j] < 0.0f ? 1 : 0;
    q.levels[j] =
        norm > 0.0 ? detail::quantize_element(h[j], norm, 1 << (b - 1), rng) : 0;
  }
  return q;
}

inline QuantizedUpdate quantize(const DenseVector& h, const Scheme& scheme, Rng& rng) {
  if (const auto* u = std::get_if<Uniform>(&scheme)) {
    return quantize_uniform(h, u->bits, rng);
  }
  return quantize_mixed(h, std::get<Mixed>(scheme).alloc, rng);
}

/// Inverse map: value_j = norm * sign_j * level_j / s_j. Dropped elements are 0.
inline DenseVector dequantize(const QuantizedUpdate& q) {
  DenseVector out(q.size());
  const double norm = q.norm;
  for (std::size_t j = 0; j < out.size(); ++j) {
    const std::uint8_t b = q.bits_of(j);
    if (b == 0) {
      out[j] = 0.0f;
      continue;
    }
    const double s = static_cast<double>(1 << (b - 1));
    double v = norm * (q.levels[j] / s);
    out[j] = static_cast<float>(q.signs[j] ? -v : v);
  }
  return out;
}

/// Analytic variance bound for single-precision quantization: d / 4^b.
inline double variance_bound_uniform(int d, int bits) {
  if (d < 1) throw std::invalid_argument("variance_bound_uniform: d must be >= 1");
  if (bits < 1) throw std::invalid_argument("variance_bound_uniform: bits must be >= 1");
  return static_cast<double>(d) / std::pow(4.0, bits);
}

/// Analytic variance bound for mixed-precision quantization:
/// q_f = sum_j (d / 4^{b_j}) |h_j|^2 / ||h||^2. Zero-bit entries keep the
/// literal 4^0 = 1 weight, so dropping large components is penalized.
inline double variance_bound_mixed(const DenseVector& h, const BitAllocation& alloc) {
  require_finite(h, "variance_bound_mixed");
  alloc.validate();
  if (alloc.bits.size() != h.size()) {
    throw std::invalid_argument("variance_bound_mixed: allocation length mismatch");
  }
  const double n2 = squared_l2_norm(h);
  if (n2 <= 0.0) {
    throw std::invalid_argument("variance_bound_mixed: zero vector has no bound");
  }
  const double d = static_cast<double>(h.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) {
    const double hj2 = static_cast<double>(h[j]) * static_cast<double>(h[j]);
    acc += d / std::pow(4.0, alloc.bits[j]) * hj2;
  }
  return acc / n2;
}

/// Monte-Carlo mean of ||dequantize(quantize(h)) - h||^2 over independent
/// quantizations.
inline double empirical_mse(const DenseVector& h, const Scheme& scheme, int trials,
                            Rng& rng) {
  if (trials < 1) throw std::invalid_argument("empirical_mse: trials must be >= 1");
  double acc = 0.0;
  for (int t = 0; t < trials; ++t) {
    DenseVector back = dequantize(quantize(h, scheme, rng));
    acc += squared_distance(back, h);
  }
  return acc / trials;
}

}  // namespace fedfq::quant
