#pragma once

#include <string_view>

namespace cloudq {

/// Simulated time in abstract milliseconds. Durations share the same unit.
using SimTime = double;
using Duration = double;

inline constexpr double kMsPerHour = 3'600'000.0;

enum class TimeUnit { Ms, Hours };

constexpr double ms_per_unit(TimeUnit unit) noexcept {
  return unit == TimeUnit::Hours ? kMsPerHour : 1.0;
}

constexpr Duration to_ms(double value, TimeUnit unit) noexcept {
  return value * ms_per_unit(unit);
}

constexpr double from_ms(Duration ms, TimeUnit unit) noexcept {
  return ms / ms_per_unit(unit);
}

constexpr std::string_view to_string(TimeUnit unit) noexcept {
  return unit == TimeUnit::Hours ? "hours" : "ms";
}

}  // namespace cloudq
