#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>

namespace ivnsim {

// Simulation clock value / duration in integer nanoseconds. Nanosecond
// resolution keeps microsecond-scale per-hop costs exact without
// floating-point drift over 60+ second runs.
struct SimTime {
  std::int64_t ns{0};

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime operator+(SimTime o) const { return SimTime{ns + o.ns}; }
  constexpr SimTime operator-(SimTime o) const { return SimTime{ns - o.ns}; }
  constexpr SimTime operator*(std::int64_t k) const { return SimTime{ns * k}; }
  SimTime& operator+=(SimTime o) {
    ns += o.ns;
    return *this;
  }
  SimTime& operator-=(SimTime o) {
    ns -= o.ns;
    return *this;
  }

  double to_seconds() const { return static_cast<double>(ns) * 1e-9; }
};

constexpr SimTime nanoseconds(std::int64_t v) { return SimTime{v}; }
constexpr SimTime microseconds(std::int64_t v) { return SimTime{v * 1000}; }
constexpr SimTime milliseconds(std::int64_t v) { return SimTime{v * 1000 * 1000}; }
constexpr SimTime seconds(std::int64_t v) { return SimTime{v * 1000 * 1000 * 1000}; }

inline SimTime from_seconds(double s) {
  return SimTime{static_cast<std::int64_t>(std::llround(s * 1e9))};
}

inline std::string to_string(SimTime t) { return std::to_string(t.ns); }

}  // namespace ivnsim
