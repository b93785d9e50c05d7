#include "ivnsim/metrics.hpp"

#include <algorithm>

namespace ivnsim {

SimTime transfer_time(const ArrivalRecord& r) {
  if (r.t_recv < r.t_send) {
    throw CorruptedRecordError("arrival record flow=" + std::to_string(r.flow) +
                               " seq=" + std::to_string(r.seq) + " has t_recv < t_send");
  }
  return r.t_recv - r.t_send;
}

FlowAggregate aggregate(std::span<const ArrivalRecord> records, int flow) {
  FlowAggregate agg;
  for (const auto& r : records) {
    if (r.flow != flow) continue;
    agg.total_transfer += transfer_time(r);
    ++agg.k;
  }
  if (agg.k == 0) {
    throw UndefinedAverageError("flow " + std::to_string(flow) +
                                " delivered zero packets; average undefined");
  }
  return agg;
}

double afcp_ns(double attf_ns, double attn_ns) { return attf_ns - attn_ns; }

FrequencyReport frequency_integrity(std::span<const SimTime> arrivals, SimTime period,
                                    double tolerance, SimTime run_end) {
  if (arrivals.size() < 2) {
    throw std::invalid_argument("frequency integrity needs at least two arrivals");
  }
  const auto slack = SimTime{static_cast<std::int64_t>(
      static_cast<double>(period.ns) * tolerance)};
  FrequencyReport rep;
  for (std::size_t i = 1; i < arrivals.size(); ++i) {
    const SimTime gap = arrivals[i] - arrivals[i - 1];
    ++rep.gaps;
    const SimTime dev = gap > period ? gap - period : period - gap;
    if (dev <= slack) {
      ++rep.within;
    } else {
      rep.violations.push_back({i, arrivals[i - 1], arrivals[i], gap});
    }
  }
  rep.fraction = static_cast<double>(rep.within) / static_cast<double>(rep.gaps);
  rep.last_arrival = arrivals.back();
  rep.truncated = rep.last_arrival + period * 2 < run_end;
  return rep;
}

void attribute_failover(ArrivalRecord& r, std::span<const SimTime> failure_times, SimTime detect) {
  const SimTime stall = r.final_emit - r.first_emit;
  if (stall <= SimTime{0}) return;
  SimTime in_detect{0};
  for (const SimTime t_fail : failure_times) {
    const SimTime lo = std::max(r.first_emit, t_fail);
    const SimTime hi = std::min(r.final_emit, t_fail + detect);
    if (hi > lo) in_detect += hi - lo;
  }
  if (in_detect > stall) in_detect = stall;
  r.decomp.fo_detect = in_detect;
  r.decomp.fo_retransmit = stall - in_detect;
}

bool decomposition_closed(const ArrivalRecord& r) {
  return transfer_time(r) == r.decomp.total();
}

}  // namespace ivnsim
