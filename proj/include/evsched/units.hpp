#pragma once

#include <cstdint>

namespace evsched {

/// Canonical time unit: whole seconds from the start of the planning horizon.
/// Energy is expressed in seconds of driving as well.
using Seconds = std::int64_t;

inline constexpr double kMetersPerMile = 1609.344;
inline constexpr double kMeanEarthRadiusM = 6371008.8;
inline constexpr double kDefaultSpeedMph = 30.0;

constexpr double mph_to_mps(double mph) { return mph * kMetersPerMile / 3600.0; }

/// Driving time for `miles` at `speed_mph`; 60 mi at 30 mph is 7200 s.
constexpr double miles_to_seconds(double miles, double speed_mph = kDefaultSpeedMph) {
  return miles / speed_mph * 3600.0;
}

}  // namespace evsched
