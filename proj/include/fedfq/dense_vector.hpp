#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedfq {

/// Flat vector of 32-bit reals. Carries model parameters and update deltas.
/// All norm/error accumulation is done in double to keep the 32-bit storage
/// from polluting test tolerances.
using DenseVector = std::vector<float>;

inline bool all_finite(std::span<const float> v) {
  for (float x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

inline void require_finite(std::span<const float> v, const char* what) {
  if (v.empty()) {
    throw std::invalid_argument(std::string(what) + ": empty vector");
  }
  if (!all_finite(v)) {
    throw std::invalid_argument(std::string(what) + ": non-finite element");
  }
}

/// l2 norm, accumulated in double.
inline double l2_norm(std::span<const float> v) {
  double acc = 0.0;
  for (float x : v) acc += static_cast<double>(x) * static_cast<double>(x);
  return std::sqrt(acc);
}

inline double squared_l2_norm(std::span<const float> v) {
  double acc = 0.0;
  for (float x : v) acc += static_cast<double>(x) * static_cast<double>(x);
  return acc;
}

inline double squared_distance(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += d * d;
  }
  return acc;
}

}  // namespace fedfq
