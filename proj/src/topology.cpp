#include "ivnsim/topology.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ivnsim {

using nlohmann::json;

namespace {

std::string idx_path(const std::string& base, std::size_t i, const char* field = nullptr) {
  std::string p = base + "[" + std::to_string(i) + "]";
  if (field) p += std::string(".") + field;
  return p;
}

PortRef parse_port_ref(const std::string& text, const std::string& where) {
  auto dot = text.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 >= text.size()) {
    throw ConfigError(where, "expected \"node.port\", got '" + text + "'");
  }
  return PortRef{text.substr(0, dot), text.substr(dot + 1)};
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ConfigError(where, std::string("missing required key '") + key + "'");
  }
  return *it;
}

SimTime us_field(const json& obj, const char* key, SimTime fallback, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) throw ConfigError(where + "." + key, "expected a number (microseconds)");
  return from_seconds(it->get<double>() * 1e-6);
}

}  // namespace

Document load_document_from_text(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source, std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("$", "top level must be an object");

  Document doc;
  doc.source = source;

  const json& nodes = require(j, "nodes", "$");
  if (!nodes.is_array() || nodes.empty()) {
    throw ConfigError("$.nodes", "must be a non-empty array");
  }
  std::set<std::string> node_ids;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string where = idx_path("$.nodes", i);
    const json& n = nodes[i];
    Node node;
    node.id = require(n, "id", where).get<std::string>();
    std::string kind = require(n, "kind", where).get<std::string>();
    if (kind == "ecu") {
      node.kind = NodeKind::Ecu;
    } else if (kind == "switch") {
      node.kind = NodeKind::Switch;
    } else {
      throw ConfigError(where + ".kind", "unknown node kind '" + kind + "'");
    }
    if (!node_ids.insert(node.id).second) {
      throw ConfigError(where + ".id", "duplicate node id '" + node.id + "'");
    }
    doc.nodes.push_back(std::move(node));
  }

  std::set<std::string> link_ids;
  if (j.contains("links")) {
    const json& links = j["links"];
    if (!links.is_array()) throw ConfigError("$.links", "must be an array");
    for (std::size_t i = 0; i < links.size(); ++i) {
      const std::string where = idx_path("$.links", i);
      const json& l = links[i];
      Link link;
      link.id = require(l, "id", where).get<std::string>();
      if (!link_ids.insert(link.id).second) {
        throw ConfigError(where + ".id", "duplicate link id '" + link.id + "'");
      }
      link.a = parse_port_ref(require(l, "a", where).get<std::string>(), where + ".a");
      link.b = parse_port_ref(require(l, "b", where).get<std::string>(), where + ".b");
      link.delay = us_field(l, "delay_us", microseconds(1), where);
      if (link.delay <= SimTime{0}) {
        throw ConfigError(where + ".delay_us", "propagation delay must be > 0");
      }
      if (link.a == link.b) {
        throw ConfigError(where, "link endpoints must differ");
      }
      for (const auto* ref : {&link.a, &link.b}) {
        if (!node_ids.count(ref->node)) {
          throw ConfigError(where, "dangling port reference '" + ref->str() +
                                       "': node '" + ref->node + "' is not defined");
        }
      }
      doc.links.push_back(std::move(link));
    }
  }

  std::set<std::string> segment_ids;
  if (j.contains("segments")) {
    const json& segs = j["segments"];
    if (!segs.is_array()) throw ConfigError("$.segments", "must be an array");
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const std::string where = idx_path("$.segments", i);
      const json& s = segs[i];
      Segment seg;
      seg.id = require(s, "id", where).get<std::string>();
      if (!segment_ids.insert(seg.id).second) {
        throw ConfigError(where + ".id", "duplicate segment id '" + seg.id + "'");
      }
      if (s.contains("bitrate_bps")) seg.bitrate_bps = s["bitrate_bps"].get<std::int64_t>();
      if (seg.bitrate_bps <= 0) throw ConfigError(where + ".bitrate_bps", "must be > 0");
      for (const auto& a : require(s, "attached", where)) {
        std::string id = a.get<std::string>();
        if (!node_ids.count(id)) {
          throw ConfigError(where + ".attached", "undefined node '" + id + "'");
        }
        seg.attached.push_back(std::move(id));
      }
      if (s.contains("sever_sides")) {
        const json& sides = s["sever_sides"];
        if (!sides.is_array() || sides.size() != 2) {
          throw ConfigError(where + ".sever_sides", "expected two arrays of node ids");
        }
        std::pair<std::vector<std::string>, std::vector<std::string>> p;
        for (const auto& v : sides[0]) p.first.push_back(v.get<std::string>());
        for (const auto& v : sides[1]) p.second.push_back(v.get<std::string>());
        seg.sever_sides = std::move(p);
      }
      doc.segments.push_back(std::move(seg));
    }
  }

  if (j.contains("bridges")) {
    const json& brs = j["bridges"];
    if (!brs.is_array()) throw ConfigError("$.bridges", "must be an array");
    std::set<std::string> bridge_ids;
    for (std::size_t i = 0; i < brs.size(); ++i) {
      const std::string where = idx_path("$.bridges", i);
      const json& b = brs[i];
      Bridge br;
      br.id = require(b, "id", where).get<std::string>();
      if (!bridge_ids.insert(br.id).second) {
        throw ConfigError(where + ".id", "duplicate bridge id '" + br.id + "'");
      }
      br.seg_a = require(b, "a", where).get<std::string>();
      br.seg_b = require(b, "b", where).get<std::string>();
      for (const auto* s : {&br.seg_a, &br.seg_b}) {
        if (!segment_ids.count(*s)) {
          throw ConfigError(where, "undefined segment '" + *s + "'");
        }
      }
      if (br.seg_a == br.seg_b) throw ConfigError(where, "bridge must join two distinct segments");
      doc.bridges.push_back(std::move(br));
    }
  }

  if (doc.links.empty() == doc.segments.empty()) {
    throw ConfigError("$", doc.links.empty()
                               ? "document needs either 'links' (switched) or 'segments' (bus)"
                               : "document cannot mix 'links' and 'segments'");
  }

  if (j.contains("flows")) {
    const json& flows = j["flows"];
    if (!flows.is_array()) throw ConfigError("$.flows", "must be an array");
    std::set<std::pair<std::string, std::string>> flow_keys;
    std::set<std::uint32_t> can_ids;
    for (std::size_t i = 0; i < flows.size(); ++i) {
      const std::string where = idx_path("$.flows", i);
      const json& f = flows[i];
      FlowSpec flow;
      flow.src = require(f, "src", where).get<std::string>();
      flow.dst = require(f, "dst", where).get<std::string>();
      for (const auto* n : {&flow.src, &flow.dst}) {
        if (!node_ids.count(*n)) throw ConfigError(where, "undefined node '" + *n + "'");
      }
      flow.period = from_seconds(require(f, "period_ms", where).get<double>() * 1e-3);
      if (flow.period <= SimTime{0}) throw ConfigError(where + ".period_ms", "must be > 0");
      flow.can_id = require(f, "can_id", where).get<std::uint32_t>();
      if (flow.can_id >= 2048) throw ConfigError(where + ".can_id", "must fit 11 bits");
      if (!can_ids.insert(flow.can_id).second) {
        throw ConfigError(where + ".can_id", "arbitration id " + std::to_string(flow.can_id) +
                                                 " is used by another flow");
      }
      if (f.contains("start_s")) flow.start = from_seconds(f["start_s"].get<double>());
      if (flow.start < SimTime{0}) throw ConfigError(where + ".start_s", "must be >= 0");
      if (!flow_keys.insert({flow.src, flow.dst}).second) {
        throw ConfigError(where, "duplicate flow " + flow.name());
      }
      doc.flows.push_back(std::move(flow));
    }
  }

  if (j.contains("scenario")) {
    const json& sc = j["scenario"];
    const std::string where = "$.scenario";
    if (sc.contains("duration_s")) doc.duration = from_seconds(sc["duration_s"].get<double>());
    if (doc.duration <= SimTime{0}) throw ConfigError(where + ".duration_s", "must be > 0");
    if (sc.contains("failures")) {
      const json& fails = sc["failures"];
      if (!fails.is_array()) throw ConfigError(where + ".failures", "must be an array");
      for (std::size_t i = 0; i < fails.size(); ++i) {
        const std::string fwhere = idx_path(where + ".failures", i);
        const json& f = fails[i];
        FailureSpec spec;
        spec.target = require(f, "link", fwhere).get<std::string>();
        spec.at = from_seconds(require(f, "at_s", fwhere).get<double>());
        if (spec.at < SimTime{0} || spec.at >= doc.duration) {
          throw ConfigError(fwhere + ".at_s", "failure time must lie within [0, duration)");
        }
        if (!link_ids.count(spec.target) && !segment_ids.count(spec.target)) {
          throw ConfigError(fwhere + ".link", "unknown link or segment '" + spec.target + "'");
        }
        doc.failures.push_back(std::move(spec));
      }
    }
  }

  if (j.contains("timing")) {
    const json& t = j["timing"];
    const std::string where = "$.timing";
    TimingConfig def;
    doc.timing.encap = us_field(t, "encap_us", def.encap, where);
    doc.timing.decap = us_field(t, "decap_us", def.decap, where);
    doc.timing.forward = us_field(t, "forward_us", def.forward, where);
    doc.timing.controller_proc = us_field(t, "controller_us", def.controller_proc, where);
    doc.timing.detect = us_field(t, "detect_us", def.detect, where);
    doc.timing.reconfigure = us_field(t, "reconfigure_us", def.reconfigure, where);
  }
  if (j.contains("reliability")) {
    const json& r = j["reliability"];
    if (r.contains("rto_ms")) doc.reliability.rto = from_seconds(r["rto_ms"].get<double>() * 1e-3);
    if (doc.reliability.rto <= SimTime{0}) throw ConfigError("$.reliability.rto_ms", "must be > 0");
    if (r.contains("max_retries")) doc.reliability.max_retries = r["max_retries"].get<int>();
    if (doc.reliability.max_retries < 0) throw ConfigError("$.reliability.max_retries", "must be >= 0");
  }

  return doc;
}

Document load_document_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open topology document");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_document_from_text(ss.str(), path);
}

Topology::Topology(const Document& doc) : doc_(&doc) {
  for (std::size_t i = 0; i < doc.nodes.size(); ++i) node_index_[doc.nodes[i].id] = i;

  for (std::size_t i = 0; i < doc.links.size(); ++i) {
    const Link& l = doc.links[i];
    link_index_[l.id] = i;
    for (const auto* ref : {&l.a, &l.b}) {
      auto [it, fresh] = port_to_link_.insert({*ref, i});
      if (!fresh) {
        throw ConfigError("$.links", "port '" + ref->str() + "' belongs to more than one link");
      }
    }
  }

  // Each ECU attaches through exactly one adapter port, to a switch.
  for (const auto& n : doc.nodes) {
    if (n.kind != NodeKind::Ecu || doc.links.empty()) continue;
    int touching = 0;
    const Link* att = nullptr;
    for (const auto& l : doc.links) {
      if (l.a.node == n.id || l.b.node == n.id) {
        ++touching;
        att = &l;
      }
    }
    if (touching != 1) {
      throw ConfigError("$.links", "ECU '" + n.id + "' must attach through exactly one link, has " +
                                       std::to_string(touching));
    }
    const std::string peer = att->other(n.id).node;
    if (node(peer).kind != NodeKind::Switch) {
      throw ConfigError("$.links", "ECU '" + n.id + "' must attach to a switch, not '" + peer + "'");
    }
  }

  // Connected over up links at t=0.
  if (!doc.links.empty()) {
    std::set<std::string> seen;
    std::vector<std::string> stack{doc.nodes.front().id};
    while (!stack.empty()) {
      std::string cur = stack.back();
      stack.pop_back();
      if (!seen.insert(cur).second) continue;
      for (const auto& l : doc.links) {
        if (l.a.node == cur) stack.push_back(l.b.node);
        if (l.b.node == cur) stack.push_back(l.a.node);
      }
    }
    if (seen.size() != doc.nodes.size()) {
      throw ConfigError("$", "topology graph is not connected at t=0");
    }
  }
}

const Node& Topology::node(const std::string& id) const {
  auto it = node_index_.find(id);
  if (it == node_index_.end()) throw ConfigError("$", "unknown node '" + id + "'");
  return doc_->nodes[it->second];
}

const Link& Topology::link(const std::string& id) const {
  auto it = link_index_.find(id);
  if (it == link_index_.end()) throw ConfigError("$", "unknown link '" + id + "'");
  return doc_->links[it->second];
}

std::vector<std::string> Topology::ports_of(const std::string& node) const {
  std::vector<std::string> out;
  for (const auto& [ref, li] : port_to_link_) {
    if (ref.node == node) out.push_back(ref.port);
  }
  return out;  // map iteration is already sorted
}

const Link& Topology::link_at(const PortRef& port) const {
  auto it = port_to_link_.find(port);
  if (it == port_to_link_.end()) throw ConfigError("$", "no link at port '" + port.str() + "'");
  return doc_->links[it->second];
}

const Link& Topology::attachment(const std::string& ecu) const {
  for (const auto& l : doc_->links) {
    if (l.a.node == ecu || l.b.node == ecu) return l;
  }
  throw ConfigError("$", "ECU '" + ecu + "' has no attachment link");
}

PortRef Topology::attachment_switch_port(const std::string& ecu) const {
  const Link& l = attachment(ecu);
  return l.other(ecu);
}

std::vector<std::string> Topology::switch_ids() const {
  std::vector<std::string> out;
  for (const auto& n : doc_->nodes) {
    if (n.kind == NodeKind::Switch) out.push_back(n.id);
  }
  return out;
}

std::vector<std::string> Topology::ecu_ids() const {
  std::vector<std::string> out;
  for (const auto& n : doc_->nodes) {
    if (n.kind == NodeKind::Ecu) out.push_back(n.id);
  }
  return out;
}

std::vector<std::string> Topology::edge_switch_ids() const {
  std::set<std::string> edge;
  for (const auto& n : doc_->nodes) {
    if (n.kind == NodeKind::Ecu) edge.insert(attachment_switch_port(n.id).node);
  }
  return {edge.begin(), edge.end()};
}

std::vector<const Link*> Topology::backbone_links() const {
  std::vector<const Link*> out;
  for (const auto& l : doc_->links) {
    if (node(l.a.node).kind == NodeKind::Switch && node(l.b.node).kind == NodeKind::Switch) {
      out.push_back(&l);
    }
  }
  return out;
}

SimTime path_propagation_delay(const Topology& topo, std::span<const std::string> link_ids) {
  SimTime total{0};
  const Link* prev = nullptr;
  for (const auto& id : link_ids) {
    const Link& l = topo.link(id);
    if (prev) {
      const bool joined = prev->a.node == l.a.node || prev->a.node == l.b.node ||
                          prev->b.node == l.a.node || prev->b.node == l.b.node;
      if (!joined) {
        throw ConfigError("$", "links '" + prev->id + "' and '" + l.id + "' do not form a chain");
      }
    }
    total += l.delay;
    prev = &l;
  }
  return total;
}

}  // namespace ivnsim
