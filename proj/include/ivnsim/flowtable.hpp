#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ivnsim/frame.hpp"

namespace ivnsim {

struct Action {
  enum class Type { Output, Group, Flood, Drop };
  Type type{Type::Drop};
  std::string port;  // Output
  int group_id{0};   // Group

  static Action output(std::string p) { return {Type::Output, std::move(p), 0}; }
  static Action group(int id) { return {Type::Group, {}, id}; }
  static Action flood() { return {Type::Flood, {}, 0}; }
  static Action drop() { return {Type::Drop, {}, 0}; }

  bool operator==(const Action&) const = default;
  std::string str() const;
};

struct Match {
  std::optional<std::string> in_port;
  std::optional<std::string> dst_addr;

  bool matches(const std::string& port, const EthFrame& frame) const {
    if (in_port && *in_port != port) return false;
    if (dst_addr && *dst_addr != frame.dst_addr) return false;
    return true;
  }
  bool operator==(const Match&) const = default;
  std::string str() const;
};

struct FlowEntry {
  int priority{0};
  Match match;
  Action action;
};

struct Bucket {
  std::string watch_port;
  std::vector<Action> actions;
};

// Fast-failover group: ordered buckets, first one whose watch port is live
// supplies the actions.
struct GroupEntry {
  int id{0};
  std::vector<Bucket> buckets;
};

// Highest-priority-wins match-action table. A miss is a defined outcome
// (the caller forwards to the controller as a packet-in).
class FlowTable {
 public:
  // Replaces any entry with an identical (priority, match).
  void install(FlowEntry entry);

  std::optional<Action> lookup(const std::string& in_port, const EthFrame& frame) const;

  const std::vector<FlowEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<FlowEntry> entries_;  // kept sorted: priority desc, install order stable
};

// First bucket whose watch port is live, or nullptr when every watch port is
// dead (caller drops and counts the exhaustion).
const Bucket* resolve_group(const GroupEntry& group,
                            const std::function<bool(const std::string&)>& port_live);

}  // namespace ivnsim
