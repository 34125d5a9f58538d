#pragma once

#include <array>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace fedfq {

/// Per-element bit widths live on a fixed ladder. Rung indices 0..3 map to
/// bit widths 0, 2, 4, 8.
inline constexpr std::array<std::uint8_t, 4> kBitLadder{0, 2, 4, 8};

/// Rung index of a ladder bit width, or -1 if not on the ladder.
inline int rung_of(std::uint8_t bits) {
  switch (bits) {
    case 0: return 0;
    case 2: return 1;
    case 4: return 2;
    case 8: return 3;
    default: return -1;
  }
}

/// Per-parameter bit-width assignment under a total uplink budget.
struct BitAllocation {
  std::vector<std::uint8_t> bits;  // each entry on the ladder
  std::uint64_t budget = 0;        // total permitted bits

  std::uint64_t used_bits() const {
    return std::accumulate(bits.begin(), bits.end(), std::uint64_t{0});
  }

  void validate() const {
    for (std::uint8_t b : bits) {
      if (rung_of(b) < 0) {
        throw std::invalid_argument("BitAllocation: bit width not on ladder {0,2,4,8}");
      }
    }
    if (used_bits() > budget) {
      throw std::invalid_argument("BitAllocation: used bits exceed budget");
    }
  }

  bool operator==(const BitAllocation&) const = default;
};

}  // namespace fedfq
