#include "ivnsim/switch.hpp"

#include <algorithm>
#include <stdexcept>

namespace ivnsim {

const char* port_admin_name(PortAdmin a) {
  switch (a) {
    case PortAdmin::Enabled: return "enabled";
    case PortAdmin::Standby: return "standby";
    case PortAdmin::Disabled: return "disabled";
  }
  return "?";
}

SwitchModel::SwitchModel(std::string id, std::vector<std::string> ports,
                         const TimingConfig& timing, Engine* engine, TraceLog* trace)
    : id_(std::move(id)), ports_(std::move(ports)), timing_(timing), engine_(engine),
      trace_(trace) {
  std::sort(ports_.begin(), ports_.end());
  for (const auto& p : ports_) {
    live_[p] = true;
    admin_[p] = PortAdmin::Enabled;
  }
}

void SwitchModel::install_entry(FlowEntry entry) {
  if (entry.action.type == Action::Type::Output && !live_.count(entry.action.port)) {
    throw std::invalid_argument(id_ + ": entry outputs to unknown port '" + entry.action.port + "'");
  }
  table_.install(std::move(entry));
}

void SwitchModel::install_group(GroupEntry group) {
  if (group.buckets.empty()) {
    throw std::invalid_argument(id_ + ": group must have at least one bucket");
  }
  for (const auto& b : group.buckets) {
    if (!live_.count(b.watch_port)) {
      throw std::invalid_argument(id_ + ": watch port '" + b.watch_port +
                                  "' does not belong to this switch");
    }
  }
  groups_[group.id] = std::move(group);
}

void SwitchModel::on_frame(const std::string& in_port, FrameInFlight f) {
  auto action = table_.lookup(in_port, f.frame);
  if (!action) {
    trace_->add(engine_->now(), TraceKind::TableMiss, id_,
                "in=" + in_port + " dst=" + f.frame.dst_addr, -1,
                static_cast<std::int64_t>(f.frame.seq));
    packet_in_(in_port, std::move(f));
    return;
  }
  apply(*action, in_port, std::move(f));
}

void SwitchModel::execute_action(const Action& action, const std::string& in_port,
                                 FrameInFlight f) {
  apply(action, in_port, std::move(f));
}

void SwitchModel::apply(const Action& action, const std::string& in_port, FrameInFlight f) {
  switch (action.type) {
    case Action::Type::Output:
      egress(action.port, std::move(f), false);
      return;
    case Action::Type::Group: {
      auto it = groups_.find(action.group_id);
      if (it == groups_.end()) {
        throw std::logic_error(id_ + ": entry references missing group " +
                               std::to_string(action.group_id));
      }
      const Bucket* bucket =
          resolve_group(it->second, [this](const std::string& p) { return port_usable(p); });
      if (!bucket) {
        ++group_exhausted_;
        ++drops_;
        trace_->add(engine_->now(), TraceKind::SwitchDrop, id_,
                    "group=" + std::to_string(action.group_id) + " exhausted", -1,
                    static_cast<std::int64_t>(f.frame.seq));
        return;
      }
      for (const auto& a : bucket->actions) apply(a, in_port, f);
      return;
    }
    case Action::Type::Flood: {
      // Copies leave every port except the ingress, dead ports, and
      // admin-disabled ports.
      std::vector<std::string> out;
      for (const auto& p : ports_) {
        if (p != in_port && port_live(p) && admin_state(p) == PortAdmin::Enabled) {
          out.push_back(p);
        }
      }
      trace_->add(engine_->now(), TraceKind::SwitchFlood, id_,
                  "in=" + in_port + " copies=" + std::to_string(out.size()), -1,
                  static_cast<std::int64_t>(f.frame.seq));
      for (const auto& p : out) egress(p, f, true);
      return;
    }
    case Action::Type::Drop:
      ++drops_;
      trace_->add(engine_->now(), TraceKind::SwitchDrop, id_, "drop-action", -1,
                  static_cast<std::int64_t>(f.frame.seq));
      return;
  }
}

void SwitchModel::egress(const std::string& port, FrameInFlight f, bool flooded) {
  const SimTime at = engine_->now() + timing_.forward;
  engine_->schedule(at, [this, port, f = std::move(f), flooded]() mutable {
    // Never emit on a port believed dead or hard-disabled; state may have
    // flipped during the forwarding delay.
    if (!port_usable(port)) {
      ++drops_;
      trace_->add(engine_->now(), TraceKind::SwitchDrop, id_, "egress-port-down port=" + port, -1,
                  static_cast<std::int64_t>(f.frame.seq));
      return;
    }
    f.forward_accum += timing_.forward;
    if (!flooded) {
      trace_->add(engine_->now(), TraceKind::SwitchForward, id_, "port=" + port, -1,
                  static_cast<std::int64_t>(f.frame.seq));
    }
    emit_(port, std::move(f));
  }, "switch-egress");
}

void SwitchModel::handle_port_down(const std::string& port) {
  auto it = live_.find(port);
  if (it == live_.end() || !it->second) return;
  it->second = false;
  trace_->add(engine_->now(), TraceKind::PortDetectedDown, id_, "port=" + port);
  if (notify_down_) notify_down_(port);
}

bool SwitchModel::port_live(const std::string& port) const {
  auto it = live_.find(port);
  return it != live_.end() && it->second;
}

void SwitchModel::set_admin(const std::string& port, PortAdmin state) {
  auto it = admin_.find(port);
  if (it == admin_.end()) return;
  it->second = state;
}

PortAdmin SwitchModel::admin_state(const std::string& port) const {
  auto it = admin_.find(port);
  return it == admin_.end() ? PortAdmin::Disabled : it->second;
}

bool SwitchModel::port_usable(const std::string& port) const {
  return port_live(port) && admin_state(port) != PortAdmin::Disabled;
}

void SwitchModel::snapshot(std::ostream& os) const {
  os << "switch " << id_ << " (miss: packet-in)\n";
  os << "  ports:";
  for (const auto& p : ports_) {
    os << " " << p << "[" << (port_live(p) ? "up" : "down") << ","
       << port_admin_name(admin_state(p)) << "]";
  }
  os << "\n  flow-table:\n";
  if (table_.empty()) os << "    (empty)\n";
  for (const auto& e : table_.entries()) {
    os << "    prio=" << e.priority << " match{" << e.match.str() << "} -> " << e.action.str()
       << "\n";
  }
  os << "  group-table:\n";
  if (groups_.empty()) os << "    (empty)\n";
  for (const auto& [gid, g] : groups_) {
    os << "    group=" << gid << " type=fast-failover buckets=[";
    for (std::size_t i = 0; i < g.buckets.size(); ++i) {
      if (i) os << ", ";
      os << "watch=" << g.buckets[i].watch_port << " actions=(";
      for (std::size_t k = 0; k < g.buckets[i].actions.size(); ++k) {
        if (k) os << ",";
        os << g.buckets[i].actions[k].str();
      }
      os << ")";
    }
    os << "]\n";
  }
}

}  // namespace ivnsim
