#pragma once

#include <bit>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fedfq/quantizer.hpp"

namespace fedfq::codec {

/// Serialized update. payload_bits counts exactly the sign+level stream
/// (sum of per-element bit widths); everything else, including the rare
/// top-of-grid escape list, is header accounting.
struct EncodedBlob {
  std::vector<std::uint8_t> bytes;
  std::uint64_t payload_bits = 0;
  std::uint64_t header_bits = 0;
};

enum class RatioMode { kPayloadOnly, kTotal };

namespace detail {

class BitWriter {
 public:
  explicit BitWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  /// Appends the low n bits of value, most significant bit first.
  void put(std::uint32_t value, int n) {
    for (int i = n - 1; i >= 0; --i) {
      cur_ = static_cast<std::uint8_t>((cur_ << 1) | ((value >> i) & 1u));
      if (++filled_ == 8) {
        out_.push_back(cur_);
        cur_ = 0;
        filled_ = 0;
      }
    }
  }

  /// Zero-pads to the next byte boundary.
  void pad() {
    if (filled_ > 0) {
      out_.push_back(static_cast<std::uint8_t>(cur_ << (8 - filled_)));
      cur_ = 0;
      filled_ = 0;
    }
  }

 private:
  std::vector<std::uint8_t>& out_;
  std::uint8_t cur_ = 0;
  int filled_ = 0;
};

class BitReader {
 public:
  BitReader(const std::vector<std::uint8_t>& in, std::size_t byte_pos)
      : in_(in), pos_(byte_pos) {}

  std::uint32_t get(int n) {
    std::uint32_t v = 0;
    for (int i = 0; i < n; ++i) {
      if (pos_ >= in_.size()) throw std::runtime_error("decode: truncated payload");
      v = (v << 1) | ((in_[pos_] >> (7 - filled_ - 1 + 1 - 1)) & 1u);
      // bit index within byte runs 7..0
      if (++filled_ == 8) {
        filled_ = 0;
        ++pos_;
      }
    }
    return v;
  }

  void align() {
    if (filled_ > 0) {
      filled_ = 0;
      ++pos_;
    }
  }

  std::size_t byte_pos() const { return pos_; }

 private:
  const std::vector<std::uint8_t>& in_;
  std::size_t pos_;
  int filled_ = 0;
};

inline void put_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 24));
}

inline std::uint32_t get_u32_le(const std::vector<std::uint8_t>& in, std::size_t& pos) {
  if (pos + 4 > in.size()) throw std::runtime_error("decode: truncated header");
  std::uint32_t v = static_cast<std::uint32_t>(in[pos]) |
                    (static_cast<std::uint32_t>(in[pos + 1]) << 8) |
                    (static_cast<std::uint32_t>(in[pos + 2]) << 16) |
                    (static_cast<std::uint32_t>(in[pos + 3]) << 24);
  pos += 4;
  return v;
}

}  // namespace detail

/// Byte layout (little-endian):
///   [u8 tag: 0=Uniform 1=Mixed][u32 d][f32 norm]
///   [Uniform: u8 b | Mixed: packed 2-bit rung codes, MSB-first, byte-padded]
///   [payload: per element in index order, 1 sign bit then (b_j-1) level bits,
///    MSB-first, zero-padded to a byte boundary]
///   [u32 overflow count][u32 element index]*
/// The overflow list names elements whose level sits at the top of the grid
/// (level == 2^(b-1)), which does not fit in b-1 bits; their stored level
/// bits read 2^(b-1)-1 and are corrected on decode.
inline EncodedBlob encode(const quant::QuantizedUpdate& q) {
  using quant::QuantizedUpdate;
  EncodedBlob blob;
  const std::uint32_t d = q.size();
  const bool mixed = q.kind == QuantizedUpdate::Kind::kMixed;

  blob.bytes.push_back(mixed ? 1 : 0);
  detail::put_u32_le(blob.bytes, d);
  detail::put_u32_le(blob.bytes, std::bit_cast<std::uint32_t>(q.norm));
  blob.header_bits = 8 + 32 + 32;

  if (!mixed) {
    blob.bytes.push_back(q.uniform_bits);
    blob.header_bits += 8;
  } else {
    detail::BitWriter w(blob.bytes);
    for (std::uint32_t j = 0; j < d; ++j) {
      w.put(static_cast<std::uint32_t>(rung_of(q.mixed_bits[j])), 2);
    }
    w.pad();
    blob.header_bits += 2ull * d;
  }

  std::vector<std::uint32_t> overflow;
  {
    detail::BitWriter w(blob.bytes);
    for (std::uint32_t j = 0; j < d; ++j) {
      const int b = q.bits_of(j);
      if (b == 0) continue;
      const std::uint32_t top = 1u << (b - 1);
      std::uint32_t level = q.levels[j];
      if (level == top) {
        overflow.push_back(j);
        level = top - 1;
      }
      w.put(q.signs[j], 1);
      if (b > 1) w.put(level, b - 1);
      blob.payload_bits += b;
    }
    w.pad();
  }

  detail::put_u32_le(blob.bytes, static_cast<std::uint32_t>(overflow.size()));
  for (std::uint32_t j : overflow) detail::put_u32_le(blob.bytes, j);
  blob.header_bits += 32 + 32ull * overflow.size();
  return blob;
}

inline quant::QuantizedUpdate decode(const EncodedBlob& blob) {
  using quant::QuantizedUpdate;
  const auto& in = blob.bytes;
  std::size_t pos = 0;
  if (in.empty()) throw std::runtime_error("decode: empty blob");

  QuantizedUpdate q;
  const std::uint8_t tag = in[pos++];
  if (tag > 1) throw std::runtime_error("decode: unknown scheme tag");
  q.kind = tag == 0 ? QuantizedUpdate::Kind::kUniform : QuantizedUpdate::Kind::kMixed;
  const std::uint32_t d = detail::get_u32_le(in, pos);
  q.norm = std::bit_cast<float>(detail::get_u32_le(in, pos));

  if (q.kind == QuantizedUpdate::Kind::kUniform) {
    if (pos >= in.size()) throw std::runtime_error("decode: truncated header");
    q.uniform_bits = in[pos++];
    if (q.uniform_bits < 1 || q.uniform_bits > 8) {
      throw std::runtime_error("decode: bad uniform bit width");
    }
  } else {
    detail::BitReader r(in, pos);
    q.mixed_bits.resize(d);
    for (std::uint32_t j = 0; j < d; ++j) {
      q.mixed_bits[j] = kBitLadder[r.get(2)];
    }
    r.align();
    pos = r.byte_pos();
  }

  q.signs.assign(d, 0);
  q.levels.assign(d, 0);
  {
    detail::BitReader r(in, pos);
    for (std::uint32_t j = 0; j < d; ++j) {
      const int b = q.bits_of(j);
      if (b == 0) continue;
      q.signs[j] = static_cast<std::uint8_t>(r.get(1));
      q.levels[j] = b > 1 ? static_cast<std::uint8_t>(r.get(b - 1)) : 0;
    }
    r.align();
    pos = r.byte_pos();
  }

  const std::uint32_t overflow_count = detail::get_u32_le(in, pos);
  for (std::uint32_t k = 0; k < overflow_count; ++k) {
    const std::uint32_t j = detail::get_u32_le(in, pos);
    if (j >= d) throw std::runtime_error("decode: overflow index out of range");
    const int b = q.bits_of(j);
    if (b == 0) throw std::runtime_error("decode: overflow on dropped element");
    q.levels[j] = static_cast<std::uint8_t>(1u << (b - 1));
  }
  return q;
}

/// 32-bit-float uplink size over encoded size. PayloadOnly ignores headers,
/// matching the usual compression-ratio arithmetic (2-bit -> 16x).
inline double compression_ratio(const EncodedBlob& blob, std::uint32_t d,
                                RatioMode mode) {
  if (d < 1) throw std::invalid_argument("compression_ratio: d must be >= 1");
  const double raw = 32.0 * d;
  const std::uint64_t denom = mode == RatioMode::kPayloadOnly
                                  ? blob.payload_bits
                                  : blob.payload_bits + blob.header_bits;
  if (denom == 0) return std::numeric_limits<double>::infinity();
  return raw / static_cast<double>(denom);
}

}  // namespace fedfq::codec
