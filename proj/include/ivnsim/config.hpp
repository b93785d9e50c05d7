#pragma once

#include <cstdint>

#include "ivnsim/time.hpp"

namespace ivnsim {

// Per-component delay knobs. The topology document may override any of
// them under its "timing" key; these defaults keep every component of the
// per-packet decomposition visible without one term dominating.
struct TimingConfig {
  SimTime encap = microseconds(5);            // adapter encapsulation
  SimTime decap = microseconds(5);            // adapter decapsulation
  SimTime forward = microseconds(10);         // per-switch store-and-forward
  SimTime controller_proc = microseconds(100);  // per handled control message
  SimTime detect = microseconds(50);          // port failure detection lag
  SimTime reconfigure = microseconds(20);     // controller path-wide port flip
};

struct ReliabilityConfig {
  SimTime rto = milliseconds(2);
  int max_retries = 5;
};

// High-speed CAN default; the bus baseline serializes frames at this rate.
constexpr std::int64_t kDefaultBusBitrate = 500'000;

}  // namespace ivnsim
