#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ivnsim/time.hpp"

namespace ivnsim {

// An in-vehicle payload as generated by an ECU function.
struct CanMessage {
  std::uint32_t can_id{0};  // 11-bit arbitration identifier, lower wins
  std::uint8_t dlc{0};      // 0..8
  std::vector<std::uint8_t> payload;
  std::string src_ecu;
  SimTime gen_time{0};

  bool operator==(const CanMessage&) const = default;
};

constexpr std::uint32_t kMaxCanId = 2048;
constexpr std::uint8_t kMaxDlc = 8;

inline bool can_message_valid(const CanMessage& m) {
  return m.can_id < kMaxCanId && m.dlc <= kMaxDlc && m.payload.size() == m.dlc;
}

// Classic CAN frame occupancy: fixed framing plus 8 bits per payload byte.
// Bit stuffing is deliberately ignored; occupancy is approximate but exact
// arithmetic for tests.
inline std::int64_t can_frame_bits(std::uint8_t dlc) { return 44 + 8 * static_cast<std::int64_t>(dlc); }

inline SimTime can_frame_time(std::uint8_t dlc, std::int64_t bitrate_bps) {
  // bits / (bits/s) in integer nanoseconds
  return SimTime{can_frame_bits(dlc) * 1'000'000'000 / bitrate_bps};
}

}  // namespace ivnsim
