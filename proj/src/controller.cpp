#include "ivnsim/controller.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <set>

namespace ivnsim {

namespace {

struct Arc {
  std::string from;
  std::string to;
  std::string link;
  std::int64_t weight;
};

std::vector<Arc> backbone_arcs(const Topology& topo) {
  std::vector<Arc> arcs;
  for (const Link* l : topo.backbone_links()) {
    arcs.push_back({l->a.node, l->b.node, l->id, l->delay.ns});
    arcs.push_back({l->b.node, l->a.node, l->id, l->delay.ns});
  }
  std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) {
    return std::tie(a.from, a.to, a.link) < std::tie(b.from, b.to, b.link);
  });
  return arcs;
}

struct Step {
  std::string node;
  std::string link;
};

// Dijkstra over explicit arcs; deterministic through sorted arcs and a
// (dist, node) heap. Returns the step sequence or empty if unreachable.
std::vector<Step> dijkstra(const std::vector<Arc>& arcs, const std::string& src,
                           const std::string& dst) {
  std::map<std::string, std::vector<const Arc*>> adj;
  for (const auto& a : arcs) adj[a.from].push_back(&a);

  std::map<std::string, std::int64_t> dist;
  std::map<std::string, Step> pred;
  using QItem = std::pair<std::int64_t, std::string>;
  std::priority_queue<QItem, std::vector<QItem>, std::greater<>> q;
  dist[src] = 0;
  q.push({0, src});
  while (!q.empty()) {
    auto [d, u] = q.top();
    q.pop();
    if (d != dist[u]) continue;
    if (u == dst) break;
    for (const Arc* a : adj[u]) {
      const std::int64_t nd = d + a->weight;
      auto it = dist.find(a->to);
      if (it == dist.end() || nd < it->second) {
        dist[a->to] = nd;
        pred[a->to] = Step{u, a->link};
        q.push({nd, a->to});
      }
    }
  }
  if (!dist.count(dst)) return {};
  std::vector<Step> steps;
  std::string cur = dst;
  while (cur != src) {
    const Step& s = pred.at(cur);
    steps.push_back({cur, s.link});  // node = step target
    cur = s.node;
  }
  std::reverse(steps.begin(), steps.end());
  return steps;
}

std::int64_t path_cost(const Topology& topo, const std::vector<std::string>& links) {
  std::int64_t c = 0;
  for (const auto& id : links) c += topo.link(id).delay.ns;
  return c;
}

}  // namespace

bool PathPair::disjoint() const {
  std::set<std::string> s(path1.begin(), path1.end());
  for (const auto& l : path2) {
    if (s.count(l)) return false;
  }
  return true;
}

bool PathPair::contains(const std::string& link_id, int* which) const {
  if (std::find(path1.begin(), path1.end(), link_id) != path1.end()) {
    if (which) *which = 0;
    return true;
  }
  if (std::find(path2.begin(), path2.end(), link_id) != path2.end()) {
    if (which) *which = 1;
    return true;
  }
  return false;
}

std::vector<std::string> shortest_switch_path(const Topology& topo, const std::string& src_switch,
                                              const std::string& dst_switch) {
  if (src_switch == dst_switch) return {};
  auto steps = dijkstra(backbone_arcs(topo), src_switch, dst_switch);
  std::vector<std::string> links;
  for (const auto& s : steps) links.push_back(s.link);
  return links;
}

PathPair compute_disjoint_paths(const Topology& topo, const std::string& src_switch,
                                const std::string& dst_switch) {
  topo.node(src_switch);
  topo.node(dst_switch);
  if (src_switch == dst_switch) return {};

  const auto arcs = backbone_arcs(topo);
  const auto first = dijkstra(arcs, src_switch, dst_switch);
  if (first.empty()) {
    throw NoDisjointPathsError("no backbone path between " + src_switch + " and " + dst_switch);
  }

  // Directed steps of the first path, keyed (from, to, link).
  std::set<std::tuple<std::string, std::string, std::string>> on_first;
  {
    std::string prev = src_switch;
    for (const auto& s : first) {
      on_first.insert({prev, s.node, s.link});
      prev = s.node;
    }
  }

  // Residual arcs: forward arcs of the first path removed, reverse arcs
  // negated. Negative weights require Bellman-Ford for the second pass.
  std::vector<Arc> residual;
  for (const auto& a : arcs) {
    if (on_first.count({a.from, a.to, a.link})) continue;
    Arc r = a;
    if (on_first.count({a.to, a.from, a.link})) r.weight = -r.weight;
    residual.push_back(r);
  }

  std::map<std::string, std::int64_t> dist;
  std::map<std::string, Step> pred;
  dist[src_switch] = 0;
  const std::size_t n = topo.switch_ids().size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    bool changed = false;
    for (const auto& a : residual) {
      auto it = dist.find(a.from);
      if (it == dist.end()) continue;
      const std::int64_t nd = it->second + a.weight;
      auto jt = dist.find(a.to);
      if (jt == dist.end() || nd < jt->second) {
        dist[a.to] = nd;
        pred[a.to] = Step{a.from, a.link};
        changed = true;
      }
    }
    if (!changed) break;
  }
  if (!dist.count(dst_switch)) {
    throw NoDisjointPathsError("no two link-disjoint paths between " + src_switch + " and " +
                               dst_switch);
  }

  // Second walk's directed steps.
  std::set<std::tuple<std::string, std::string, std::string>> on_second;
  {
    std::string cur = dst_switch;
    std::set<std::string> guard;
    while (cur != src_switch) {
      if (!guard.insert(cur).second) {
        throw NoDisjointPathsError("negative-cycle anomaly between " + src_switch + " and " +
                                   dst_switch);
      }
      const Step& s = pred.at(cur);
      on_second.insert({s.node, cur, s.link});
      cur = s.node;
    }
  }

  // Union minus interlacing: a link used forward by one walk and backward by
  // the other drops out entirely.
  std::set<std::tuple<std::string, std::string, std::string>> edges = on_first;
  for (const auto& [from, to, link] : on_second) {
    auto rev = std::make_tuple(to, from, link);
    if (edges.count(rev)) {
      edges.erase(rev);
    } else {
      edges.insert({from, to, link});
    }
  }

  // Decompose the remaining directed edges into two paths src -> dst,
  // smallest (next node, link) first for determinism.
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> out;
  for (const auto& [from, to, link] : edges) out[from].push_back({to, link});
  for (auto& [_, v] : out) std::sort(v.begin(), v.end());

  auto walk = [&]() {
    std::vector<std::string> links;
    std::string cur = src_switch;
    while (cur != dst_switch) {
      auto& choices = out[cur];
      if (choices.empty()) {
        throw NoDisjointPathsError("path decomposition failed at " + cur);
      }
      auto [next, link] = choices.front();
      choices.erase(choices.begin());
      links.push_back(link);
      cur = next;
    }
    return links;
  };

  PathPair pair;
  pair.path1 = walk();
  pair.path2 = walk();

  const std::int64_t c1 = path_cost(topo, pair.path1);
  const std::int64_t c2 = path_cost(topo, pair.path2);
  if (c2 < c1 || (c1 == c2 && pair.path2 < pair.path1)) {
    std::swap(pair.path1, pair.path2);
  }
  return pair;
}

std::vector<std::string> path_nodes(const Topology& topo, const std::string& from,
                                    const std::vector<std::string>& link_ids) {
  std::vector<std::string> nodes{from};
  std::string cur = from;
  for (const auto& id : link_ids) {
    const Link& l = topo.link(id);
    if (l.a.node != cur && l.b.node != cur) {
      throw ConfigError("$", "link '" + id + "' does not continue path at '" + cur + "'");
    }
    cur = l.other(cur).node;
    nodes.push_back(cur);
  }
  return nodes;
}

std::string classify_path(const Topology& topo, const PathPair& pair,
                          const std::vector<std::string>& links_traversed) {
  bool p1 = false, p2 = false, backbone = false;
  for (const auto& id : links_traversed) {
    const Link& l = topo.link(id);
    if (topo.node(l.a.node).kind != NodeKind::Switch ||
        topo.node(l.b.node).kind != NodeKind::Switch) {
      continue;  // attachment link
    }
    backbone = true;
    int which = -1;
    if (pair.contains(id, &which)) {
      (which == 0 ? p1 : p2) = true;
    }
  }
  if (!backbone) return "local";
  if (p1 && !p2) return "path1";
  if (p2 && !p1) return "path2";
  return "mixed";
}

ControllerModel::ControllerModel(const Topology* topo, const TimingConfig& timing, Engine* engine,
                                 TraceLog* trace)
    : topo_(topo), timing_(timing), engine_(engine), trace_(trace) {}

void ControllerModel::log(const std::string& line) {
  if (log_) log_("t=" + to_string(engine_->now()) + " " + line);
}

void ControllerModel::bootstrap() {
  const auto edges = topo_->edge_switch_ids();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    for (std::size_t j = i + 1; j < edges.size(); ++j) {
      try {
        ProtectedPair pp;
        pp.sw_a = edges[i];
        pp.sw_b = edges[j];
        pp.paths = compute_disjoint_paths(*topo_, edges[i], edges[j]);
        const std::size_t idx = pairs_.size();
        for (const auto& l : pp.paths.path1) link_to_pair_[l] = {idx, 0};
        for (const auto& l : pp.paths.path2) link_to_pair_[l] = {idx, 1};
        log("pathpair " + pp.sw_a + "<->" + pp.sw_b + " path1=[" + [&] {
          std::string s;
          for (const auto& l : pp.paths.path1) s += (s.empty() ? "" : ",") + l;
          return s;
        }() + "] path2=[" + [&] {
          std::string s;
          for (const auto& l : pp.paths.path2) s += (s.empty() ? "" : ",") + l;
          return s;
        }() + "] active=path1");
        pairs_.push_back(std::move(pp));
      } catch (const NoDisjointPathsError&) {
        log("pathpair " + edges[i] + "<->" + edges[j] + " unprotectable (no disjoint paths)");
      }
    }
  }
  for (const auto& pp : pairs_) apply_path_admin(pp, false);
  if (snapshot_) snapshot_();
}

// At boot the inactive path is provisioned standby (fast-failover buckets can
// use it immediately); after a failure the dead path is hard-disabled, which
// is what flips the far edge switch's group to the surviving path.
void ControllerModel::apply_path_admin(const ProtectedPair& pair, bool failed_over) {
  const auto& active = pair.active == 0 ? pair.paths.path1 : pair.paths.path2;
  const auto& inactive = pair.active == 0 ? pair.paths.path2 : pair.paths.path1;
  const PortAdmin off = failed_over ? PortAdmin::Disabled : PortAdmin::Standby;
  // Demote the inactive path first so no instant shows both paths enabled.
  for (const auto& id : inactive) {
    const Link& l = topo_->link(id);
    admin_set_(l.a, off);
    admin_set_(l.b, off);
  }
  for (const auto& id : active) {
    const Link& l = topo_->link(id);
    admin_set_(l.a, PortAdmin::Enabled);
    admin_set_(l.b, PortAdmin::Enabled);
  }
  log("path-admin " + pair.sw_a + "<->" + pair.sw_b + " active=path" +
      std::to_string(pair.active + 1));
}

ControllerModel::ProtectedPair* ControllerModel::pair_between(const std::string& a,
                                                              const std::string& b) {
  for (auto& pp : pairs_) {
    if ((pp.sw_a == a && pp.sw_b == b) || (pp.sw_a == b && pp.sw_b == a)) return &pp;
  }
  return nullptr;
}

Action ControllerModel::handle_packet_in(const std::string& sw, const std::string& in_port,
                                         const EthFrame& frame) {
  ++packet_ins_;
  trace_->add(engine_->now(), TraceKind::PacketIn, sw,
              "in=" + in_port + " src=" + frame.src_addr + " dst=" + frame.dst_addr, -1,
              static_cast<std::int64_t>(frame.seq));

  auto& table = learned_[sw];
  auto it = table.find(frame.src_addr);
  if (it == table.end()) {
    table[frame.src_addr] = in_port;
    log("learned " + frame.src_addr + " at " + sw + "." + in_port);
  }
  if (!host_loc_.count(frame.src_addr)) {
    // First sighting anywhere is the host's edge attachment: its first frame
    // always misses at its own edge switch before any flood copy exists.
    host_loc_[frame.src_addr] = PortRef{sw, in_port};
    log("host " + frame.src_addr + " located at " + sw + "." + in_port);
  }

  std::string decision = "flood";
  Action action = Action::flood();
  if (host_loc_.count(frame.dst_addr)) {
    install_failover_rules(frame.src_addr, frame.dst_addr);
    SwitchModel* s = switch_at_(sw);
    if (auto a = s->table().lookup(in_port, frame)) {
      action = *a;
      decision = "resubmit:" + action.str();
    }
  }
  log("packet-in " + sw + " in=" + in_port + " src=" + frame.src_addr + " dst=" + frame.dst_addr +
      " seq=" + std::to_string(frame.seq) + " decision=" + decision);
  return action;
}

void ControllerModel::install_failover_rules(const std::string& src_addr,
                                             const std::string& dst_addr) {
  install_direction(src_addr, dst_addr);
  install_direction(dst_addr, src_addr);
}

void ControllerModel::install_direction(const std::string& src_addr, const std::string& dst_addr) {
  if (!installed_.insert({src_addr, dst_addr}).second) return;
  const PortRef src_at = host_loc_.at(src_addr);
  const PortRef dst_at = host_loc_.at(dst_addr);
  const std::string s_src = src_at.node;
  const std::string s_dst = dst_at.node;

  if (s_src == s_dst) {
    SwitchModel* sw = switch_at_(s_src);
    sw->install_entry({10, Match{{}, dst_addr}, Action::output(dst_at.port)});
    trace_->add(engine_->now(), TraceKind::RuleInstall, s_src, "dst=" + dst_addr);
    log("install " + s_src + " dst=" + dst_addr + " -> output:" + dst_at.port);
    if (snapshot_) snapshot_();
    return;
  }

  ProtectedPair* pp = pair_between(s_src, s_dst);
  if (!pp) {
    // Unprotectable pair: plain cheapest-path forwarding.
    install_path_entries(dst_addr, s_src, s_dst, shortest_switch_path(*topo_, s_src, s_dst));
    SwitchModel* egress = switch_at_(s_dst);
    egress->install_entry({10, Match{{}, dst_addr}, Action::output(dst_at.port)});
    log("install " + s_dst + " dst=" + dst_addr + " -> output:" + dst_at.port);
    if (snapshot_) snapshot_();
    return;
  }

  if (!pp->paths.disjoint()) {
    throw std::invalid_argument("path pair for " + s_src + "<->" + s_dst +
                                " violates link-disjointness");
  }

  // Orient both paths away from the ingress edge switch.
  auto oriented = [&](std::vector<std::string> links) {
    auto nodes = path_nodes(*topo_, pp->sw_a, links);
    if (nodes.front() != s_src) std::reverse(links.begin(), links.end());
    return links;
  };
  const auto p1 = oriented(pp->paths.path1);
  const auto p2 = oriented(pp->paths.path2);

  // Shared fast-failover group at the divergence switch: bucket order is the
  // path preference, each bucket watching its own egress port.
  const auto gkey = std::make_pair(s_src, s_dst);
  auto git = group_ids_.find(gkey);
  int gid;
  if (git != group_ids_.end()) {
    gid = git->second;
  } else {
    gid = ++next_group_id_[s_src];
    group_ids_[gkey] = gid;
    auto egress_port = [&](const std::vector<std::string>& links) {
      const Link& l = topo_->link(links.front());
      return (l.a.node == s_src ? l.a : l.b).port;
    };
    GroupEntry group;
    group.id = gid;
    group.buckets.push_back({egress_port(p1), {Action::output(egress_port(p1))}});
    group.buckets.push_back({egress_port(p2), {Action::output(egress_port(p2))}});
    switch_at_(s_src)->install_group(group);
    trace_->add(engine_->now(), TraceKind::GroupInstall, s_src,
                "group=" + std::to_string(gid) + " toward=" + s_dst);
    log("install-group " + s_src + " group=" + std::to_string(gid) + " watch=[" +
        group.buckets[0].watch_port + "," + group.buckets[1].watch_port + "]");
  }

  switch_at_(s_src)->install_entry({10, Match{{}, dst_addr}, Action::group(gid)});
  trace_->add(engine_->now(), TraceKind::RuleInstall, s_src, "dst=" + dst_addr);
  log("install " + s_src + " dst=" + dst_addr + " -> group:" + std::to_string(gid));

  // Next-hop entries along both paths past the divergence switch.
  install_path_entries(dst_addr, s_src, s_dst, p1);
  install_path_entries(dst_addr, s_src, s_dst, p2);

  SwitchModel* egress = switch_at_(s_dst);
  egress->install_entry({10, Match{{}, dst_addr}, Action::output(dst_at.port)});
  trace_->add(engine_->now(), TraceKind::RuleInstall, s_dst, "dst=" + dst_addr);
  log("install " + s_dst + " dst=" + dst_addr + " -> output:" + dst_at.port);
  if (snapshot_) snapshot_();
}

void ControllerModel::install_path_entries(const std::string& dst_addr, const std::string& s_src,
                                           const std::string& s_dst,
                                           const std::vector<std::string>& links) {
  const auto nodes = path_nodes(*topo_, s_src, links);
  for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
    const Link& next = topo_->link(links[i]);
    const std::string& here = nodes[i];
    const std::string port = (next.a.node == here ? next.a : next.b).port;
    switch_at_(here)->install_entry({10, Match{{}, dst_addr}, Action::output(port)});
    trace_->add(engine_->now(), TraceKind::RuleInstall, here, "dst=" + dst_addr);
    log("install " + here + " dst=" + dst_addr + " -> output:" + port);
  }
  (void)s_dst;
}

void ControllerModel::handle_port_status(const std::string& sw, const std::string& port,
                                         bool down) {
  trace_->add(engine_->now(), TraceKind::PortStatus, sw, "port=" + port + (down ? " down" : " up"));

  const Link* link = nullptr;
  try {
    link = &topo_->link_at(PortRef{sw, port});
  } catch (const ConfigError&) {
    log("port-status " + sw + "." + port + " ignored (unknown port)");
    return;
  }

  auto it = link_to_pair_.find(link->id);
  if (it == link_to_pair_.end()) {
    log("port-status " + sw + "." + port + " link=" + link->id + " unprotected, no action");
    return;
  }
  ProtectedPair& pp = pairs_[it->second.first];
  const int which = it->second.second;
  if (which != pp.active) {
    log("port-status " + sw + "." + port + " link=" + link->id +
        " on standby path, no dataplane change");
    return;
  }
  if (pp.switch_pending) {
    log("port-status " + sw + "." + port + " link=" + link->id + " already handled");
    return;
  }
  pp.switch_pending = true;
  log("port-status " + sw + "." + port + " link=" + link->id + " on active path" +
      std::to_string(pp.active + 1) + ", switching paths");

  // Path-wide port flip after the reconfiguration latency: disable every port
  // of the failed path, enable the standby path's ports, atomically.
  ProtectedPair* ppp = &pp;
  engine_->schedule(engine_->now() + timing_.reconfigure, [this, ppp]() {
    ppp->active ^= 1;
    ppp->switch_pending = false;
    apply_path_admin(*ppp, true);
    trace_->add(engine_->now(), TraceKind::PathSwitch, ppp->sw_a + "<->" + ppp->sw_b,
                "active=path" + std::to_string(ppp->active + 1));
    if (snapshot_) snapshot_();
  }, "path-reconfigure");
}

}  // namespace ivnsim
