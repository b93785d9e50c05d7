#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ivnsim/controller.hpp"
#include "ivnsim/metrics.hpp"
#include "ivnsim/topology.hpp"
#include "ivnsim/trace.hpp"

namespace ivnsim {

struct AdminChange {
  SimTime t;
  PortRef port;
  PortAdmin state{PortAdmin::Enabled};
};

struct FlowStats {
  std::string name;
  std::uint64_t generated{0};
  std::uint64_t delivered{0};
  std::uint64_t lost{0};
  std::uint64_t duplicates{0};
  std::uint64_t retransmissions{0};

  std::uint64_t in_flight() const { return generated - delivered - lost; }
};

struct StormReport {
  bool monitored{false};
  double offered_load{0};     // sum of flow frame-time/period fractions
  double peak_utilization{0}; // max rolling-1s utilization over all segments
  SimTime first_duplicate{-1};
  SimTime outage_at{-1};      // first instant rolling utilization >= 0.99
  std::uint64_t duplicate_deliveries{0};
};

struct RunResult {
  RunMode mode{RunMode::Sdivn};
  SimTime duration{0};
  std::uint64_t seed{0};
  std::string config_hash;
  std::vector<FlowSpec> flows;
  TimingConfig timing;
  ReliabilityConfig reliability;
  std::vector<FailureSpec> failures_applied;

  std::vector<ArrivalRecord> records;
  std::vector<FlowStats> stats;
  TraceLog trace;
  std::vector<std::string> control_log;
  std::string table_snapshots;
  std::vector<AdminChange> admin_timeline;
  std::vector<ControllerModel::ProtectedPair> pairs;
  std::uint64_t packet_in_count{0};
  StormReport storm;

  // Sorted first-arrival times of one flow (for frequency reports).
  std::vector<SimTime> arrival_times(int flow) const;
};

struct RunOverrides {
  std::optional<SimTime> duration;
  std::optional<std::vector<FailureSpec>> failures;  // replaces the document's
  std::optional<RunMode> mode;
  std::uint64_t seed{0};
};

// Hash of everything except the failure schedule; paired runs must agree.
std::string config_hash(const Document& doc, const RunOverrides& ov);

RunResult run_scenario(const Document& doc, const RunOverrides& ov = {});

struct PairedFlowSummary {
  std::string flow;
  std::uint64_t k_normal{0};
  std::uint64_t k_failure{0};
  SimTime tt_normal{0};
  SimTime tt_failure{0};
  double attn_ns{0};
  double attf_ns{0};
  double afcp_ns{0};
  double afcp_pct{0};
  // k_failure * afcp in exact integer ns when K matches (oracle comparisons).
  std::int64_t afcp_numer_ns{0};
};

// Pairs a no-failure run with a failure run of the identical configuration.
// Throws IncomparableRunsError when the configurations differ.
std::vector<PairedFlowSummary> pair_runs(const RunResult& normal, const RunResult& failure);

struct CompareResult {
  RunResult normal;
  RunResult failure;
  std::vector<PairedFlowSummary> summaries;
};

// Runs the no-failure leg and the failure leg under one configuration.
CompareResult run_compare(const Document& doc, const RunOverrides& ov = {});

}  // namespace ivnsim
