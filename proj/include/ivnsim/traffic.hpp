#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "ivnsim/can.hpp"
#include "ivnsim/engine.hpp"
#include "ivnsim/metrics.hpp"
#include "ivnsim/topology.hpp"

namespace ivnsim {

// Periodic message source: one message per period from spec.start, strictly
// before `end`. Payload bytes come from a per-flow seeded stream so paired
// runs generate identical traffic.
void start_periodic_generator(Engine& engine, const FlowSpec& spec, SimTime end,
                              std::uint64_t seed, int flow_index,
                              std::function<void(CanMessage)> emit);

// Receiver-side arrival ledger with duplicate detection per (flow, seq).
class ArrivalBook {
 public:
  explicit ArrivalBook(std::size_t flow_count) : dup_counts_(flow_count, 0) {}

  // Returns the fresh record, or nullptr for a duplicate (the original
  // record's dup_count is bumped and the first arrival kept for T_p).
  ArrivalRecord* on_receive(int flow, std::uint64_t seq, SimTime t_send, SimTime t_recv);

  std::vector<ArrivalRecord>& records() { return records_; }
  const std::vector<ArrivalRecord>& records() const { return records_; }
  bool delivered(int flow, std::uint64_t seq) const { return index_.count({flow, seq}) > 0; }
  std::uint64_t duplicates(int flow) const { return dup_counts_[static_cast<std::size_t>(flow)]; }
  SimTime first_duplicate_at() const { return first_dup_; }
  std::uint64_t duplicate_total() const { return dup_total_; }

 private:
  std::vector<ArrivalRecord> records_;
  std::map<std::pair<int, std::uint64_t>, std::size_t> index_;
  std::vector<std::uint64_t> dup_counts_;
  std::uint64_t dup_total_ = 0;
  SimTime first_dup_{-1};
};

}  // namespace ivnsim
