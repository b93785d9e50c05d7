#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ivnsim/time.hpp"

namespace ivnsim {

enum class TraceKind {
  MsgGenerated,
  FrameEmit,       // frame leaves an adapter port (first or retransmitted copy)
  FrameArrive,     // frame reaches a node port
  LinkDrop,        // frame lost on a failed link
  SwitchForward,   // unicast egress after the forwarding delay
  SwitchFlood,     // flood egress
  SwitchDrop,      // drop action / dead egress / group exhausted
  TableMiss,
  PacketIn,        // controller accepted a table-miss frame
  RuleInstall,
  GroupInstall,
  PortPhysDown,
  PortDetectedDown,  // switch liveness map updated
  PortStatus,        // controller handled a port-status notification
  AdminPortSet,
  PathSwitch,
  Delivered,
  DuplicateArrival,
  DecodeError,
  AckEmit,
  AckConsumed,
  Retransmit,
  RetriesExhausted,
  BusTxStart,
  BusTxEnd,
  BusDelivered,
  BridgeForward,
  BusSevered,
  BusPartitionDrop,
};

const char* trace_kind_name(TraceKind k);

struct TraceEvent {
  SimTime t;
  TraceKind kind;
  std::string where;  // node, port, or link the event is about
  std::string what;   // free-form detail, stable formatting
  std::int64_t flow{-1};
  std::int64_t seq{-1};

  std::string format() const;
};

// Ordered event log of a run. Byte-identical text for identical runs is the
// replay-determinism contract.
class TraceLog {
 public:
  void add(SimTime t, TraceKind kind, std::string where, std::string what,
           std::int64_t flow = -1, std::int64_t seq = -1) {
    events_.push_back(TraceEvent{t, kind, std::move(where), std::move(what), flow, seq});
  }

  const std::vector<TraceEvent>& events() const { return events_; }

  std::string to_text() const;

  std::size_t count(TraceKind kind) const;
  std::size_t count_if(const std::function<bool(const TraceEvent&)>& pred) const;
  std::vector<const TraceEvent*> select(TraceKind kind) const;

 private:
  std::vector<TraceEvent> events_;
};

}  // namespace ivnsim
