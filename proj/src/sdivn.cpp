#include "ivnsim/sdivn.hpp"

#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "ivnsim/adapter.hpp"
#include "ivnsim/engine.hpp"
#include "ivnsim/switch.hpp"
#include "ivnsim/traffic.hpp"

namespace ivnsim {

namespace {

struct LinkState {
  bool failed{false};
  SimTime failed_at{0};
};

class SdivnSim {
 public:
  SdivnSim(const Document& doc, const Topology& topo, SimTime duration,
           std::vector<FailureSpec> failures, std::uint64_t seed)
      : doc_(doc), topo_(topo), duration_(duration), failures_(std::move(failures)), seed_(seed),
        timing_(doc.timing), rel_(doc.reliability), book_(doc.flows.size()),
        controller_(&topo_, timing_, &engine_, &trace_) {
    for (const auto& f : failures_) {
      if (!topo_.has_link(f.target)) {
        throw ConfigError("$.scenario.failures", "unknown link '" + f.target + "'");
      }
      if (f.at >= duration_) {
        throw ConfigError("$.scenario.failures", "failure at " + to_string(f.at) +
                                                     "ns is outside the run");
      }
    }
    for (const auto& l : doc_.links) link_state_[l.id] = LinkState{};

    for (const auto& id : topo_.switch_ids()) {
      auto sw = std::make_unique<SwitchModel>(id, topo_.ports_of(id), timing_, &engine_, &trace_);
      sw->set_emit_fn([this, id](const std::string& port, FrameInFlight f) {
        send_on_link(topo_.link_at(PortRef{id, port}), PortRef{id, port}, std::move(f));
      });
      sw->set_packet_in_fn([this, id](const std::string& in_port, FrameInFlight f) {
        f.controller_accum += timing_.controller_proc;
        engine_.schedule(engine_.now() + timing_.controller_proc,
                         [this, id, in_port, f = std::move(f)]() mutable {
                           const Action a = controller_.handle_packet_in(id, in_port, f.frame);
                           switches_.at(id)->execute_action(a, in_port, std::move(f));
                         },
                         "packet-in");
      });
      sw->set_port_down_notify_fn([this, id](const std::string& port) {
        engine_.schedule(engine_.now() + timing_.controller_proc,
                         [this, id, port]() { controller_.handle_port_status(id, port, true); },
                         "port-status");
      });
      switches_[id] = std::move(sw);
    }

    for (std::size_t i = 0; i < doc_.flows.size(); ++i) {
      const auto& f = doc_.flows[i];
      flow_index_[{f.src, f.dst}] = static_cast<int>(i);
      stats_.push_back(FlowStats{f.name()});
    }

    for (const auto& ecu : topo_.ecu_ids()) {
      auto ad = std::make_unique<AdapterModel>(ecu, timing_, rel_, &engine_, &trace_);
      ad->set_emit_fn([this, ecu](FrameInFlight f) {
        const Link& l = topo_.attachment(ecu);
        send_on_link(l, l.a.node == ecu ? l.a : l.b, std::move(f));
      });
      ad->set_deliver_fn([this](const CanMessage& msg, const FrameInFlight& f) {
        on_delivery(msg, f);
      });
      ad->set_loss_fn([this, ecu](const std::string& dst, std::uint64_t) {
        if (const int* fl = flow_of(ecu, dst)) ++stats_[static_cast<std::size_t>(*fl)].lost;
      });
      ad->set_retransmit_fn([this, ecu](const std::string& dst, std::uint64_t, int) {
        if (const int* fl = flow_of(ecu, dst)) {
          ++stats_[static_cast<std::size_t>(*fl)].retransmissions;
        }
      });
      adapters_[ecu] = std::move(ad);
    }

    controller_.set_switch_accessor(
        [this](const std::string& id) { return switches_.at(id).get(); });
    controller_.set_log_fn([this](const std::string& line) { control_log_.push_back(line); });
    controller_.set_admin_fn([this](const PortRef& p, PortAdmin state) {
      auto it = switches_.find(p.node);
      if (it == switches_.end()) return;
      if (it->second->admin_state(p.port) == state) return;
      it->second->set_admin(p.port, state);
      admin_timeline_.push_back({engine_.now(), p, state});
      trace_.add(engine_.now(), TraceKind::AdminPortSet, p.str(), port_admin_name(state));
      control_log_.push_back("t=" + to_string(engine_.now()) + " admin-set " + p.str() + " " +
                             port_admin_name(state));
    });
    controller_.set_snapshot_fn([this]() { dump_snapshot(); });
  }

  RunResult run() {
    controller_.bootstrap();

    for (const auto& f : failures_) {
      engine_.schedule(f.at, [this, target = f.target]() { fail_link(target); }, "link-failure");
    }

    for (std::size_t i = 0; i < doc_.flows.size(); ++i) {
      const auto& spec = doc_.flows[i];
      start_periodic_generator(engine_, spec, duration_, seed_, static_cast<int>(i),
                               [this, i, spec](CanMessage msg) {
                                 ++stats_[i].generated;
                                 trace_.add(engine_.now(), TraceKind::MsgGenerated, spec.src,
                                            "id=" + std::to_string(msg.can_id),
                                            static_cast<std::int64_t>(i));
                                 adapters_.at(spec.src)->send(msg, spec.dst);
                               });
    }

    engine_.run_until(duration_);
    return finalize();
  }

 private:
  const int* flow_of(const std::string& src, const std::string& dst) const {
    auto it = flow_index_.find({src, dst});
    return it == flow_index_.end() ? nullptr : &it->second;
  }

  void send_on_link(const Link& link, const PortRef& from, FrameInFlight f) {
    LinkState& st = link_state_.at(link.id);
    if (st.failed) {
      trace_.add(engine_.now(), TraceKind::LinkDrop, link.id, "emitted-on-failed from=" + from.str(),
                 -1, static_cast<std::int64_t>(f.frame.seq));
      return;
    }
    const PortRef to = link.other(from.node);
    engine_.schedule(engine_.now() + link.delay,
                     [this, link_id = link.id, to, f = std::move(f)]() mutable {
                       const Link& link = topo_.link(link_id);
                       if (link_state_.at(link_id).failed) {
                         trace_.add(engine_.now(), TraceKind::LinkDrop, link_id, "in-flight", -1,
                                    static_cast<std::int64_t>(f.frame.seq));
                         return;
                       }
                       f.prop_accum += link.delay;
                       f.links_traversed.push_back(link_id);
                       trace_.add(engine_.now(), TraceKind::FrameArrive, to.str(),
                                  frame_kind_name(f.frame.kind), -1,
                                  static_cast<std::int64_t>(f.frame.seq));
                       if (topo_.node(to.node).kind == NodeKind::Switch) {
                         switches_.at(to.node)->on_frame(to.port, std::move(f));
                       } else {
                         adapters_.at(to.node)->on_frame(std::move(f));
                       }
                     },
                     "frame-arrival");
  }

  void fail_link(const std::string& id) {
    LinkState& st = link_state_.at(id);
    if (st.failed) {
      control_log_.push_back("t=" + to_string(engine_.now()) + " warning: fail-link " + id +
                             " already failed (no-op)");
      return;
    }
    st.failed = true;
    st.failed_at = engine_.now();
    const Link& link = topo_.link(id);
    for (const auto* p : {&link.a, &link.b}) {
      trace_.add(engine_.now(), TraceKind::PortPhysDown, p->str(), "link=" + id);
      if (topo_.node(p->node).kind == NodeKind::Switch) {
        engine_.schedule(engine_.now() + timing_.detect,
                         [this, node = p->node, port = p->port]() {
                           switches_.at(node)->handle_port_down(port);
                         },
                         "port-detect");
      }
    }
  }

  void on_delivery(const CanMessage& msg, const FrameInFlight& f) {
    const int* fl = flow_of(f.frame.src_addr, f.frame.dst_addr);
    if (!fl) return;
    ArrivalRecord* r = book_.on_receive(*fl, f.frame.seq, f.gen_time, engine_.now());
    if (!r) {
      ++stats_[static_cast<std::size_t>(*fl)].duplicates;
      trace_.add(engine_.now(), TraceKind::DuplicateArrival, f.frame.dst_addr, "", *fl,
                 static_cast<std::int64_t>(f.frame.seq));
      return;
    }
    ++stats_[static_cast<std::size_t>(*fl)].delivered;
    r->first_emit = f.first_emit;
    r->final_emit = f.this_emit;
    r->attempts = f.attempt;
    r->links = f.links_traversed;
    r->decomp.prop = f.prop_accum;
    r->decomp.adapter = timing_.encap + timing_.decap;
    r->decomp.forward = f.forward_accum;
    r->decomp.controller = f.controller_accum;
    (void)msg;
  }

  void dump_snapshot() {
    snapshots_ << "=== t=" << to_string(engine_.now()) << " ===\n";
    for (const auto& [id, sw] : switches_) sw->snapshot(snapshots_);
  }

  RunResult finalize() {
    std::vector<SimTime> fail_times;
    for (const auto& f : failures_) fail_times.push_back(f.at);

    RunResult res;
    res.mode = RunMode::Sdivn;
    res.duration = duration_;
    res.seed = seed_;
    res.flows = doc_.flows;
    res.timing = timing_;
    res.reliability = rel_;
    res.failures_applied = failures_;
    res.pairs = controller_.pairs();
    res.packet_in_count = controller_.packet_ins();

    for (auto& r : book_.records()) {
      attribute_failover(r, fail_times, timing_.detect);
      const auto& spec = doc_.flows[static_cast<std::size_t>(r.flow)];
      const std::string s_src = topo_.attachment_switch_port(spec.src).node;
      const std::string s_dst = topo_.attachment_switch_port(spec.dst).node;
      r.path_id = "backbone";
      for (const auto& pp : res.pairs) {
        if ((pp.sw_a == s_src && pp.sw_b == s_dst) || (pp.sw_a == s_dst && pp.sw_b == s_src)) {
          r.path_id = classify_path(topo_, pp.paths, r.links);
          break;
        }
      }
      if (!decomposition_closed(r)) {
        throw std::logic_error("delay decomposition does not close for flow=" +
                               std::to_string(r.flow) + " seq=" + std::to_string(r.seq));
      }
    }

    res.records = std::move(book_.records());
    res.stats = std::move(stats_);
    res.trace = std::move(trace_);
    res.control_log = std::move(control_log_);
    res.table_snapshots = snapshots_.str();
    res.admin_timeline = std::move(admin_timeline_);
    return res;
  }

  const Document& doc_;
  const Topology& topo_;
  SimTime duration_;
  std::vector<FailureSpec> failures_;
  std::uint64_t seed_;
  TimingConfig timing_;
  ReliabilityConfig rel_;

  Engine engine_;
  TraceLog trace_;
  ArrivalBook book_;
  std::map<std::string, std::unique_ptr<SwitchModel>> switches_;
  std::map<std::string, std::unique_ptr<AdapterModel>> adapters_;
  ControllerModel controller_;
  std::map<std::string, LinkState> link_state_;
  std::map<std::pair<std::string, std::string>, int> flow_index_;
  std::vector<FlowStats> stats_;
  std::vector<std::string> control_log_;
  std::ostringstream snapshots_;
  std::vector<AdminChange> admin_timeline_;
};

}  // namespace

RunResult run_sdivn(const Document& doc, const RunOverrides& ov) {
  if (doc.links.empty()) {
    throw ConfigError(doc.source, "switched mode needs a 'links' topology");
  }
  Topology topo(doc);
  const SimTime duration = ov.duration.value_or(doc.duration);
  if (duration <= SimTime{0}) throw ConfigError(doc.source, "duration must be > 0");
  SdivnSim sim(doc, topo, duration, ov.failures.value_or(doc.failures), ov.seed);
  return sim.run();
}

}  // namespace ivnsim
