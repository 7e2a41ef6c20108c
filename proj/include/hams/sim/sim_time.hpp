/*
 * Copyright 2026 The hams-sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>

#include "hams/error.hpp"

namespace hams::sim {

/// Simulated time in picoseconds. Arithmetic is overflow-checked; a wrapped
/// clock would silently reorder every event after it.
struct SimTime {
  std::uint64_t ticks = 0;

  constexpr SimTime() = default;
  constexpr explicit SimTime(std::uint64_t t) : ticks(t) {}

  constexpr auto operator<=>(const SimTime&) const = default;

  static constexpr SimTime zero() { return SimTime{0}; }
  static constexpr SimTime max() {
    return SimTime{std::numeric_limits<std::uint64_t>::max()};
  }

  double as_ns() const { return static_cast<double>(ticks) / 1e3; }
  double as_us() const { return static_cast<double>(ticks) / 1e6; }
  double as_seconds() const { return static_cast<double>(ticks) / 1e12; }

  SimTime& operator+=(SimTime rhs) {
    if (ticks > std::numeric_limits<std::uint64_t>::max() - rhs.ticks) {
      raise(ErrorCode::kClockOverflow, "simulated clock overflow");
    }
    ticks += rhs.ticks;
    return *this;
  }

  SimTime& operator-=(SimTime rhs) {
    if (rhs.ticks > ticks) {
      raise(ErrorCode::kInvariantViolation, "negative simulated duration");
    }
    ticks -= rhs.ticks;
    return *this;
  }
};

inline SimTime operator+(SimTime a, SimTime b) { return a += b; }
inline SimTime operator-(SimTime a, SimTime b) { return a -= b; }

inline SimTime operator*(SimTime a, std::uint64_t n) {
  if (n != 0 && a.ticks > std::numeric_limits<std::uint64_t>::max() / n) {
    raise(ErrorCode::kClockOverflow, "simulated clock overflow");
  }
  return SimTime{a.ticks * n};
}

inline std::ostream& operator<<(std::ostream& os, SimTime t) {
  return os << t.ticks << "ps";
}

constexpr SimTime picoseconds(std::uint64_t v) { return SimTime{v}; }
constexpr SimTime nanoseconds(std::uint64_t v) { return SimTime{v * 1000ULL}; }
constexpr SimTime microseconds(std::uint64_t v) {
  return SimTime{v * 1000'000ULL};
}

/// Time to move `bytes` at `bytes_per_second`, rounded up to the next ps.
SimTime transfer_time(std::uint64_t bytes, double bytes_per_second);

inline SimTime max(SimTime a, SimTime b) { return a < b ? b : a; }

}  // namespace hams::sim
