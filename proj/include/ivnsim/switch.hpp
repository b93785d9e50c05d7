#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "ivnsim/config.hpp"
#include "ivnsim/engine.hpp"
#include "ivnsim/flowtable.hpp"
#include "ivnsim/frame.hpp"
#include "ivnsim/trace.hpp"

namespace ivnsim {

// Controller-set port policy. Standby marks a provisioned protection port:
// excluded from flooding (and from the enabled-port timeline) but live for
// watch purposes, so a fast-failover group can use its backup bucket the
// instant the primary watch port dies, before the controller reacts. Disabled
// is a hard off: dead for watch ports and for egress.
enum class PortAdmin { Enabled, Standby, Disabled };

const char* port_admin_name(PortAdmin a);

// Dataplane switch: flow-table lookup, fast-failover group resolution, and
// store-and-forward egress after the configured forwarding delay.
//
// A port combines the switch's physical-liveness belief (flips only `detect`
// after the underlying link actually failed) with the admin policy above.
class SwitchModel {
 public:
  using EmitFn = std::function<void(const std::string& port, FrameInFlight)>;
  using PacketInFn = std::function<void(const std::string& in_port, FrameInFlight)>;
  using PortDownFn = std::function<void(const std::string& port)>;

  SwitchModel(std::string id, std::vector<std::string> ports, const TimingConfig& timing,
              Engine* engine, TraceLog* trace);

  const std::string& id() const { return id_; }

  void set_emit_fn(EmitFn fn) { emit_ = std::move(fn); }
  void set_packet_in_fn(PacketInFn fn) { packet_in_ = std::move(fn); }
  void set_port_down_notify_fn(PortDownFn fn) { notify_down_ = std::move(fn); }

  void install_entry(FlowEntry entry);
  void install_group(GroupEntry group);  // validates watch ports belong here
  const FlowTable& table() const { return table_; }
  const std::map<int, GroupEntry>& groups() const { return groups_; }

  // Frame arrival on a live port: immediate lookup, egress after `forward`.
  // A table miss hands the frame to the controller as a packet-in.
  void on_frame(const std::string& in_port, FrameInFlight f);

  // Runs an action on behalf of a controller packet-out decision; charges the
  // forwarding delay like any other egress.
  void execute_action(const Action& action, const std::string& in_port, FrameInFlight f);

  // Called `detect` after the physical failure: updates the liveness map and
  // notifies the controller.
  void handle_port_down(const std::string& port);

  bool port_live(const std::string& port) const;  // physical belief
  void set_admin(const std::string& port, PortAdmin state);
  PortAdmin admin_state(const std::string& port) const;
  // Live and not hard-disabled: what group watch ports and egress honor.
  bool port_usable(const std::string& port) const;
  const std::vector<std::string>& ports() const { return ports_; }

  std::uint64_t drops() const { return drops_; }
  std::uint64_t group_exhausted() const { return group_exhausted_; }

  void snapshot(std::ostream& os) const;

 private:
  void egress(const std::string& port, FrameInFlight f, bool flooded);
  void apply(const Action& action, const std::string& in_port, FrameInFlight f);

  std::string id_;
  std::vector<std::string> ports_;
  TimingConfig timing_;
  Engine* engine_;
  TraceLog* trace_;
  EmitFn emit_;
  PacketInFn packet_in_;
  PortDownFn notify_down_;

  FlowTable table_;
  std::map<int, GroupEntry> groups_;
  std::map<std::string, bool> live_;
  std::map<std::string, PortAdmin> admin_;
  std::uint64_t drops_ = 0;
  std::uint64_t group_exhausted_ = 0;
};

}  // namespace ivnsim
