#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ivnsim/can.hpp"
#include "ivnsim/time.hpp"

namespace ivnsim {

// Envelope carrying a CanMessage across the switched backbone.
// Documented field order: [src_addr, dst_addr, kind, seq, can_id, dlc,
// payload, gen_time].
struct EthFrame {
  enum class Kind { Data, Ack };

  std::string src_addr;
  std::string dst_addr;
  Kind kind{Kind::Data};
  std::uint64_t seq{0};  // strictly increasing per (src, dst) data stream
  CanMessage inner;

  bool operator==(const EthFrame&) const = default;
};

inline const char* frame_kind_name(EthFrame::Kind k) {
  return k == EthFrame::Kind::Data ? "data" : "ack";
}

// One traveling copy of a frame plus its delay bookkeeping. Every component
// that detains the copy adds its share here; at delivery the shares must sum
// to exactly T_r - T_s.
struct FrameInFlight {
  EthFrame frame;
  SimTime gen_time{0};    // T_s of the inner message
  SimTime first_emit{0};  // first copy's adapter egress
  SimTime this_emit{0};   // this copy's adapter egress
  int attempt{1};

  SimTime prop_accum{0};        // link propagation
  SimTime forward_accum{0};     // switch store-and-forward
  SimTime controller_accum{0};  // packet-in handling on this journey

  std::vector<std::string> links_traversed;
};

}  // namespace ivnsim
