#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace walklab {

/// Natural log floored at 1: log x stands for max{log x, 1} throughout.
inline double log1(double x) { return std::max(std::log(x), 1.0); }

/// floor(m * log1(n)^6), the horizon of the windowed tan-point and progress
/// statistics. Saturates at UINT64_MAX.
inline std::uint64_t log6_horizon(double m, double n) {
  const double h = std::floor(m * std::pow(log1(n), 6));
  return h >= 1.8e19 ? UINT64_MAX : static_cast<std::uint64_t>(h);
}

}  // namespace walklab
