#include "ivnsim/livn.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>

#include "ivnsim/can.hpp"
#include "ivnsim/engine.hpp"
#include "ivnsim/traffic.hpp"

namespace ivnsim {

namespace {

constexpr SimTime kUtilWindow = seconds(1);

struct PendingTx {
  CanMessage msg;
  int flow;
  std::uint64_t seq;
  std::string transmitter;  // node or bridge id that puts the frame on this segment
  std::uint64_t enq;
};

struct SegmentState {
  const Segment* seg{nullptr};
  bool severed{false};
  bool tx_busy{false};
  std::vector<PendingTx> queue;
  std::deque<std::pair<SimTime, SimTime>> busy_log;

  // -1 when the member is not listed; validated away for severable segments.
  int side_of(const std::string& member) const {
    if (!seg->sever_sides) return -1;
    const auto& [a, b] = *seg->sever_sides;
    if (std::find(a.begin(), a.end(), member) != a.end()) return 0;
    if (std::find(b.begin(), b.end(), member) != b.end()) return 1;
    return -1;
  }
};

class LivnSim {
 public:
  LivnSim(const Document& doc, SimTime duration, std::vector<FailureSpec> failures,
          std::uint64_t seed)
      : doc_(doc), duration_(duration), failures_(std::move(failures)), seed_(seed),
        book_(doc.flows.size()) {
    for (const auto& s : doc_.segments) segments_[s.id].seg = &s;
    for (const auto& b : doc_.bridges) {
      bridges_at_[b.seg_a].push_back(&b);
      bridges_at_[b.seg_b].push_back(&b);
    }

    for (const auto& n : doc_.nodes) {
      if (n.kind != NodeKind::Ecu) continue;
      int hits = 0;
      for (const auto& s : doc_.segments) {
        if (std::find(s.attached.begin(), s.attached.end(), n.id) != s.attached.end()) {
          segment_of_[n.id] = s.id;
          ++hits;
        }
      }
      if (hits != 1) {
        throw ConfigError("$.segments", "ECU '" + n.id + "' must attach to exactly one segment, has " +
                                            std::to_string(hits));
      }
    }

    for (std::size_t i = 0; i < doc_.flows.size(); ++i) {
      const auto& f = doc_.flows[i];
      stats_.push_back(FlowStats{f.name()});
      offered_ += static_cast<double>(can_frame_time(8, segment_for(f.src).seg->bitrate_bps).ns) /
                  static_cast<double>(f.period.ns);
    }

    for (const auto& f : failures_) {
      auto it = segments_.find(f.target);
      if (it == segments_.end()) {
        throw ConfigError("$.scenario.failures", "unknown segment '" + f.target + "'");
      }
      const Segment* seg = it->second.seg;
      if (!seg->sever_sides) {
        throw ConfigError("$.scenario.failures",
                          "segment '" + f.target + "' has no sever_sides configured");
      }
      // Every member (nodes and bridges) must sit on exactly one side.
      std::vector<std::string> members = seg->attached;
      for (const Bridge* b : bridges_at_[seg->id]) members.push_back(b->id);
      for (const auto& m : members) {
        if (it->second.side_of(m) < 0) {
          throw ConfigError("$.segments", "sever_sides of '" + seg->id + "' must place '" + m + "'");
        }
      }
    }
  }

  RunResult run() {
    for (const auto& f : failures_) {
      engine_.schedule(f.at, [this, id = f.target]() { sever(id); }, "bus-sever");
    }
    for (std::size_t i = 0; i < doc_.flows.size(); ++i) {
      const auto& spec = doc_.flows[i];
      start_periodic_generator(engine_, spec, duration_, seed_, static_cast<int>(i),
                               [this, i, spec](CanMessage msg) {
                                 ++stats_[i].generated;
                                 trace_.add(engine_.now(), TraceKind::MsgGenerated, spec.src,
                                            "id=" + std::to_string(msg.can_id),
                                            static_cast<std::int64_t>(i));
                                 PendingTx tx{std::move(msg), static_cast<int>(i),
                                              stats_[i].generated, spec.src, next_enq_++};
                                 enqueue(segment_of_.at(spec.src), std::move(tx));
                               });
    }
    engine_.run_until(duration_);
    return finalize();
  }

 private:
  SegmentState& segment_for(const std::string& node) { return segments_.at(segment_of_.at(node)); }

  void enqueue(const std::string& seg_id, PendingTx tx) {
    segments_.at(seg_id).queue.push_back(std::move(tx));
    arbitrate_soon(seg_id);
  }

  // Grant the medium only after every same-instant contender has enqueued, so
  // simultaneous transmissions arbitrate by can_id rather than event order.
  void arbitrate_soon(const std::string& seg_id) {
    engine_.schedule(engine_.now(), [this, seg_id]() { try_start(seg_id); }, "bus-arbitrate");
  }

  // One frame on the medium at a time; on a free medium the lowest
  // arbitration id among the contenders transmits first.
  void try_start(const std::string& seg_id) {
    SegmentState& st = segments_.at(seg_id);
    if (st.tx_busy || st.queue.empty()) return;
    auto best = std::min_element(st.queue.begin(), st.queue.end(),
                                 [](const PendingTx& a, const PendingTx& b) {
                                   return std::tie(a.msg.can_id, a.enq) <
                                          std::tie(b.msg.can_id, b.enq);
                                 });
    PendingTx tx = std::move(*best);
    st.queue.erase(best);
    st.tx_busy = true;
    const SimTime occupancy = can_frame_time(tx.msg.dlc, st.seg->bitrate_bps);
    const SimTime start = engine_.now();
    trace_.add(start, TraceKind::BusTxStart, seg_id,
               "id=" + std::to_string(tx.msg.can_id) + " by=" + tx.transmitter, tx.flow,
               static_cast<std::int64_t>(tx.seq));
    engine_.schedule(start + occupancy,
                     [this, seg_id, start, tx = std::move(tx)]() { on_tx_end(seg_id, start, tx); },
                     "bus-tx-end");
  }

  void on_tx_end(const std::string& seg_id, SimTime start, const PendingTx& tx) {
    SegmentState& st = segments_.at(seg_id);
    const SimTime now = engine_.now();
    trace_.add(now, TraceKind::BusTxEnd, seg_id, "id=" + std::to_string(tx.msg.can_id), tx.flow,
               static_cast<std::int64_t>(tx.seq));
    st.busy_log.push_back({start, now});
    update_utilization(st, now);

    const int tx_side = st.severed ? st.side_of(tx.transmitter) : -1;
    const FlowSpec& flow = doc_.flows[static_cast<std::size_t>(tx.flow)];

    for (const auto& node : st.seg->attached) {
      if (node == tx.transmitter) continue;
      if (st.severed && st.side_of(node) != tx_side) {
        if (node == flow.dst) {
          partition_dropped_.insert({tx.flow, tx.seq});
          trace_.add(now, TraceKind::BusPartitionDrop, seg_id, "to=" + node, tx.flow,
                     static_cast<std::int64_t>(tx.seq));
        }
        continue;
      }
      if (node != flow.dst) continue;  // heard, not consumed
      ArrivalRecord* r = book_.on_receive(tx.flow, tx.seq, tx.msg.gen_time, now);
      if (!r) {
        ++stats_[static_cast<std::size_t>(tx.flow)].duplicates;
        trace_.add(now, TraceKind::DuplicateArrival, node, "", tx.flow,
                   static_cast<std::int64_t>(tx.seq));
        continue;
      }
      ++stats_[static_cast<std::size_t>(tx.flow)].delivered;
      trace_.add(now, TraceKind::BusDelivered, node, "", tx.flow,
                 static_cast<std::int64_t>(tx.seq));
      r->first_emit = tx.msg.gen_time;
      r->final_emit = tx.msg.gen_time;
      r->attempts = 1;
      r->path_id = "bus";
      r->links = {seg_id};
      // The whole medium time (arbitration wait + serialization) is the
      // propagation share; the other components do not exist on a bus.
      r->decomp.prop = now - tx.msg.gen_time;
    }

    // Dumb redundancy: every bridge re-broadcasts frames transmitted by
    // others onto its far segment.
    for (const Bridge* b : bridges_at_[seg_id]) {
      if (b->id == tx.transmitter) continue;
      if (st.severed && st.side_of(b->id) != tx_side) continue;
      const std::string& other = b->seg_a == seg_id ? b->seg_b : b->seg_a;
      trace_.add(now, TraceKind::BridgeForward, b->id, seg_id + "->" + other, tx.flow,
                 static_cast<std::int64_t>(tx.seq));
      enqueue(other, PendingTx{tx.msg, tx.flow, tx.seq, b->id, next_enq_++});
    }

    st.tx_busy = false;
    arbitrate_soon(seg_id);
  }

  void update_utilization(SegmentState& st, SimTime now) {
    while (!st.busy_log.empty() && st.busy_log.front().second + kUtilWindow * 2 < now) {
      st.busy_log.pop_front();
    }
    if (now < kUtilWindow) return;
    const SimTime lo = now - kUtilWindow;
    std::int64_t busy = 0;
    for (const auto& [s, e] : st.busy_log) {
      const SimTime a = std::max(s, lo);
      const SimTime b = std::min(e, now);
      if (b > a) busy += (b - a).ns;
    }
    const double util = static_cast<double>(busy) / static_cast<double>(kUtilWindow.ns);
    peak_util_ = std::max(peak_util_, util);
    if (util >= 0.99 && outage_at_.ns < 0) outage_at_ = now;
  }

  void sever(const std::string& seg_id) {
    SegmentState& st = segments_.at(seg_id);
    if (st.severed) {
      control_log_.push_back("t=" + to_string(engine_.now()) + " warning: sever " + seg_id +
                             " already severed (no-op)");
      return;
    }
    st.severed = true;
    trace_.add(engine_.now(), TraceKind::BusSevered, seg_id, "partitioned");
    control_log_.push_back("t=" + to_string(engine_.now()) + " severed " + seg_id);
  }

  RunResult finalize() {
    RunResult res;
    res.mode = RunMode::Livn;
    res.duration = duration_;
    res.seed = seed_;
    res.flows = doc_.flows;
    res.timing = doc_.timing;
    res.reliability = doc_.reliability;
    res.failures_applied = failures_;
    for (auto& r : book_.records()) {
      if (!decomposition_closed(r)) {
        throw std::logic_error("bus decomposition does not close for flow=" +
                               std::to_string(r.flow) + " seq=" + std::to_string(r.seq));
      }
    }
    // A frame is lost once it was partition-dropped toward its destination
    // and no copy ever got through.
    for (const auto& key : partition_dropped_) {
      if (!book_.delivered(key.first, key.second)) {
        ++stats_[static_cast<std::size_t>(key.first)].lost;
      }
    }
    res.records = std::move(book_.records());
    res.stats = std::move(stats_);
    res.trace = std::move(trace_);
    res.control_log = std::move(control_log_);
    res.storm.monitored = true;
    res.storm.offered_load = offered_;
    res.storm.peak_utilization = peak_util_;
    res.storm.outage_at = outage_at_;
    res.storm.first_duplicate = book_.first_duplicate_at();
    res.storm.duplicate_deliveries = book_.duplicate_total();
    return res;
  }

  const Document& doc_;
  SimTime duration_;
  std::vector<FailureSpec> failures_;
  std::uint64_t seed_;

  Engine engine_;
  TraceLog trace_;
  ArrivalBook book_;
  std::map<std::string, SegmentState> segments_;
  std::map<std::string, std::vector<const Bridge*>> bridges_at_;
  std::map<std::string, std::string> segment_of_;
  std::set<std::pair<int, std::uint64_t>> partition_dropped_;
  std::vector<FlowStats> stats_;
  std::vector<std::string> control_log_;
  std::uint64_t next_enq_ = 0;
  double offered_ = 0;
  double peak_util_ = 0;
  SimTime outage_at_{-1};
};

}  // namespace

RunResult run_livn(const Document& doc, const RunOverrides& ov) {
  if (doc.segments.empty()) {
    throw ConfigError(doc.source, "bus mode needs a 'segments' topology");
  }
  const SimTime duration = ov.duration.value_or(doc.duration);
  if (duration <= SimTime{0}) throw ConfigError(doc.source, "duration must be > 0");
  auto failures = ov.failures.value_or(doc.failures);
  for (const auto& f : failures) {
    if (f.at >= duration) {
      throw ConfigError("$.scenario.failures", "failure at " + to_string(f.at) +
                                                   "ns is outside the run");
    }
  }
  LivnSim sim(doc, duration, std::move(failures), ov.seed);
  return sim.run();
}

}  // namespace ivnsim
