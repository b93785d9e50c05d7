#pragma once

#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ivnsim/engine.hpp"
#include "ivnsim/switch.hpp"
#include "ivnsim/topology.hpp"
#include "ivnsim/trace.hpp"

namespace ivnsim {

// Two link-disjoint backbone paths between the same pair of edge switches,
// cheapest first.
struct PathPair {
  std::vector<std::string> path1;  // primary, ordered link ids
  std::vector<std::string> path2;  // backup

  bool disjoint() const;
  bool contains(const std::string& link_id, int* which = nullptr) const;
};

class NoDisjointPathsError : public std::runtime_error {
 public:
  explicit NoDisjointPathsError(const std::string& msg) : std::runtime_error(msg) {}
};

// Minimum-total-delay pair of edge-disjoint paths over the switch backbone
// (shortest path, then a negative-arc relaxation pass and overlap
// cancellation). Throws NoDisjointPathsError when the graph has no two
// link-disjoint routes. src == dst yields two empty paths.
PathPair compute_disjoint_paths(const Topology& topo, const std::string& src_switch,
                                const std::string& dst_switch);

// Single cheapest backbone path (fallback for unprotectable switch pairs).
std::vector<std::string> shortest_switch_path(const Topology& topo, const std::string& src_switch,
                                              const std::string& dst_switch);

// Ordered node sequence of a link path starting at `from` (validates
// orientation as it walks).
std::vector<std::string> path_nodes(const Topology& topo, const std::string& from,
                                    const std::vector<std::string>& link_ids);

// Classifies a traversal against a protected pair: "path1", "path2", "mixed",
// or "local" when it never touched the backbone.
std::string classify_path(const Topology& topo, const PathPair& pair,
                          const std::vector<std::string>& links_traversed);

// Control applications: learning switch for host discovery, disjoint-path
// protection with fast-failover groups, and the one-path-at-a-time rule
// (on an active-path failure every port of that path is administratively
// disabled and the standby path's ports enabled).
class ControllerModel {
 public:
  using AdminSetFn = std::function<void(const PortRef&, PortAdmin state)>;
  using SnapshotFn = std::function<void()>;
  using LogFn = std::function<void(const std::string& line)>;
  using SwitchAccessor = std::function<SwitchModel*(const std::string& id)>;

  ControllerModel(const Topology* topo, const TimingConfig& timing, Engine* engine,
                  TraceLog* trace);

  void set_admin_fn(AdminSetFn fn) { admin_set_ = std::move(fn); }
  void set_snapshot_fn(SnapshotFn fn) { snapshot_ = std::move(fn); }
  void set_log_fn(LogFn fn) { log_ = std::move(fn); }
  void set_switch_accessor(SwitchAccessor fn) { switch_at_ = std::move(fn); }

  // Pre-provisions path pairs between edge switches and disables standby-path
  // ports, before any traffic. Host locations are still learned from traffic.
  void bootstrap();

  // Handles a table-miss frame (the caller has already charged the
  // controller-processing delay). Learns the source, installs failover rules
  // once both endpoints are located, and returns the action the switch should
  // apply to the parked frame.
  Action handle_packet_in(const std::string& sw, const std::string& in_port, const EthFrame& frame);

  // Port-status notification, sent by a switch once it detects a failure.
  void handle_port_status(const std::string& sw, const std::string& port, bool down);

  struct ProtectedPair {
    std::string sw_a;
    std::string sw_b;
    PathPair paths;
    int active{0};  // 0 -> path1, 1 -> path2
    bool switch_pending{false};
  };

  const std::vector<ProtectedPair>& pairs() const { return pairs_; }
  const std::map<std::string, PortRef>& host_locations() const { return host_loc_; }
  std::uint64_t packet_ins() const { return packet_ins_; }

  // Installs both forwarding directions for a located host pair; exposed for
  // tests. Throws std::invalid_argument on non-disjoint pairs.
  void install_failover_rules(const std::string& src_addr, const std::string& dst_addr);

 private:
  void install_direction(const std::string& src_addr, const std::string& dst_addr);
  void install_path_entries(const std::string& dst_addr, const std::string& s_src,
                            const std::string& s_dst, const std::vector<std::string>& links);
  ProtectedPair* pair_between(const std::string& a, const std::string& b);
  void apply_path_admin(const ProtectedPair& pair, bool failed_over);
  void log(const std::string& line);

  const Topology* topo_;
  TimingConfig timing_;
  Engine* engine_;
  TraceLog* trace_;
  AdminSetFn admin_set_;
  SnapshotFn snapshot_;
  LogFn log_;
  SwitchAccessor switch_at_;

  std::map<std::string, std::map<std::string, std::string>> learned_;  // switch -> addr -> port
  std::map<std::string, PortRef> host_loc_;                            // addr -> edge attachment
  std::vector<ProtectedPair> pairs_;
  std::map<std::string, std::pair<std::size_t, int>> link_to_pair_;  // link -> (pair idx, path)
  std::map<std::pair<std::string, std::string>, int> group_ids_;     // (switch, toward) -> group
  std::map<std::string, int> next_group_id_;
  std::set<std::pair<std::string, std::string>> installed_;
  std::uint64_t packet_ins_ = 0;
};

}  // namespace ivnsim
