#pragma once

#include <cmath>
#include <cstdint>

namespace bpfsim {

// Integer microsecond clock. Every delay constant in the protocol suite
// (WAIT_TIME, slot tau, backoff scale) is exact in microseconds, so the
// virtual clock never accumulates floating-point drift.
using SimTime = std::int64_t;

inline constexpr SimTime kMicrosPerSecond = 1'000'000;

inline SimTime us_from_seconds(double s) {
  return static_cast<SimTime>(std::llround(s * 1e6));
}

inline double seconds(SimTime t) { return static_cast<double>(t) / 1e6; }

// Travel times round up so a mover never undershoots its target point.
inline SimTime us_ceil_from_seconds(double s) {
  return static_cast<SimTime>(std::ceil(s * 1e6));
}

}  // namespace bpfsim
