#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ivnsim/time.hpp"

namespace ivnsim {

// Per-packet delay breakdown. For every delivered packet the components sum
// to exactly T_r - T_s in integer nanoseconds: propagation, adapter codec
// time, per-hop forwarding, controller handling on the packet's own journey,
// and the failover share (detection stall + retransmission wait; the
// controller's path-wide reconfiguration never blocks the dataplane, so its
// per-packet share is structurally zero and reported for completeness).
struct DelayDecomposition {
  SimTime prop{0};
  SimTime adapter{0};
  SimTime forward{0};
  SimTime controller{0};
  SimTime fo_detect{0};
  SimTime fo_reconfigure{0};
  SimTime fo_retransmit{0};

  SimTime failover() const { return fo_detect + fo_reconfigure + fo_retransmit; }
  SimTime total() const { return prop + adapter + forward + controller + failover(); }
};

struct ArrivalRecord {
  int flow{0};
  std::uint64_t seq{0};
  SimTime t_send{0};  // generation instant at the source ECU
  SimTime t_recv{0};  // delivery instant at the destination ECU
  SimTime first_emit{0};
  SimTime final_emit{0};
  DelayDecomposition decomp;
  int attempts{1};
  std::string path_id;
  std::vector<std::string> links;
  std::uint64_t dup_count{0};
};

class CorruptedRecordError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class UndefinedAverageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class IncomparableRunsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// T_r - T_s. Throws CorruptedRecordError if the record is inverted.
SimTime transfer_time(const ArrivalRecord& r);

struct FlowAggregate {
  std::uint64_t k{0};          // delivered packet count
  SimTime total_transfer{0};   // sum of per-packet transfer times
  double att_ns() const { return static_cast<double>(total_transfer.ns) / static_cast<double>(k); }
};

// Sum/average of transfer times for one flow. Throws UndefinedAverageError
// when the flow delivered nothing (an average of zero packets is undefined,
// not zero).
FlowAggregate aggregate(std::span<const ArrivalRecord> records, int flow);

// Failover cost per packet: plain difference, may be negative.
double afcp_ns(double attf_ns, double attn_ns);

struct FrequencyViolation {
  std::size_t gap_index{0};
  SimTime t_prev{0};
  SimTime t_cur{0};
  SimTime gap{0};
};

struct FrequencyReport {
  std::size_t gaps{0};
  std::size_t within{0};
  double fraction{1.0};  // gaps within period*(1 +/- tolerance)
  std::vector<FrequencyViolation> violations;
  SimTime last_arrival{0};
  bool truncated{false};  // arrivals stop well before the run end
};

// Inter-arrival integrity over sorted arrival times; `tolerance` is a
// fraction of the period. Needs at least two arrivals.
FrequencyReport frequency_integrity(std::span<const SimTime> arrivals, SimTime period,
                                    double tolerance, SimTime run_end);

// Splits a retransmitted packet's stall (first emission -> final emission)
// into the share overlapping failure-detection windows and the remaining
// retransmission wait. No-op for first-attempt deliveries.
void attribute_failover(ArrivalRecord& r, std::span<const SimTime> failure_times, SimTime detect);

// Exact closure check: T_r - T_s equals the decomposition sum.
bool decomposition_closed(const ArrivalRecord& r);

}  // namespace ivnsim
