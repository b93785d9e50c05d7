#include "ivnsim/trace.hpp"

#include <algorithm>

namespace ivnsim {

const char* trace_kind_name(TraceKind k) {
  switch (k) {
    case TraceKind::MsgGenerated: return "msg-generated";
    case TraceKind::FrameEmit: return "frame-emit";
    case TraceKind::FrameArrive: return "frame-arrive";
    case TraceKind::LinkDrop: return "link-drop";
    case TraceKind::SwitchForward: return "switch-forward";
    case TraceKind::SwitchFlood: return "switch-flood";
    case TraceKind::SwitchDrop: return "switch-drop";
    case TraceKind::TableMiss: return "table-miss";
    case TraceKind::PacketIn: return "packet-in";
    case TraceKind::RuleInstall: return "rule-install";
    case TraceKind::GroupInstall: return "group-install";
    case TraceKind::PortPhysDown: return "port-phys-down";
    case TraceKind::PortDetectedDown: return "port-detected-down";
    case TraceKind::PortStatus: return "port-status";
    case TraceKind::AdminPortSet: return "admin-port-set";
    case TraceKind::PathSwitch: return "path-switch";
    case TraceKind::Delivered: return "delivered";
    case TraceKind::DuplicateArrival: return "duplicate-arrival";
    case TraceKind::DecodeError: return "decode-error";
    case TraceKind::AckEmit: return "ack-emit";
    case TraceKind::AckConsumed: return "ack-consumed";
    case TraceKind::Retransmit: return "retransmit";
    case TraceKind::RetriesExhausted: return "retries-exhausted";
    case TraceKind::BusTxStart: return "bus-tx-start";
    case TraceKind::BusTxEnd: return "bus-tx-end";
    case TraceKind::BusDelivered: return "bus-delivered";
    case TraceKind::BridgeForward: return "bridge-forward";
    case TraceKind::BusSevered: return "bus-severed";
    case TraceKind::BusPartitionDrop: return "bus-partition-drop";
  }
  return "unknown";
}

std::string TraceEvent::format() const {
  std::string s = "t=" + to_string(t) + " " + trace_kind_name(kind) + " " + where;
  if (!what.empty()) s += " " + what;
  if (flow >= 0) s += " flow=" + std::to_string(flow);
  if (seq >= 0) s += " seq=" + std::to_string(seq);
  return s;
}

std::string TraceLog::to_text() const {
  std::string out;
  for (const auto& e : events_) {
    out += e.format();
    out += '\n';
  }
  return out;
}

std::size_t TraceLog::count(TraceKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(events_.begin(), events_.end(),
                    [&](const TraceEvent& e) { return e.kind == kind; }));
}

std::size_t TraceLog::count_if(const std::function<bool(const TraceEvent&)>& pred) const {
  return static_cast<std::size_t>(std::count_if(events_.begin(), events_.end(), pred));
}

std::vector<const TraceEvent*> TraceLog::select(TraceKind kind) const {
  std::vector<const TraceEvent*> out;
  for (const auto& e : events_) {
    if (e.kind == kind) out.push_back(&e);
  }
  return out;
}

}  // namespace ivnsim
