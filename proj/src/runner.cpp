#include "ivnsim/runner.hpp"

#include <algorithm>

#include <json.hpp>

#include "ivnsim/livn.hpp"
#include "ivnsim/sdivn.hpp"

namespace ivnsim {

namespace {

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

}  // namespace

std::vector<SimTime> RunResult::arrival_times(int flow) const {
  std::vector<SimTime> out;
  for (const auto& r : records) {
    if (r.flow == flow) out.push_back(r.t_recv);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string config_hash(const Document& doc, const RunOverrides& ov) {
  nlohmann::json j;
  for (const auto& n : doc.nodes) {
    j["nodes"].push_back({{"id", n.id}, {"kind", n.kind == NodeKind::Ecu ? "ecu" : "switch"}});
  }
  for (const auto& l : doc.links) {
    j["links"].push_back({{"id", l.id}, {"a", l.a.str()}, {"b", l.b.str()}, {"delay", l.delay.ns}});
  }
  for (const auto& s : doc.segments) {
    j["segments"].push_back({{"id", s.id}, {"bitrate", s.bitrate_bps}, {"attached", s.attached}});
  }
  for (const auto& b : doc.bridges) {
    j["bridges"].push_back({{"id", b.id}, {"a", b.seg_a}, {"b", b.seg_b}});
  }
  for (const auto& f : doc.flows) {
    j["flows"].push_back({{"src", f.src},
                          {"dst", f.dst},
                          {"period", f.period.ns},
                          {"can_id", f.can_id},
                          {"start", f.start.ns}});
  }
  j["timing"] = {doc.timing.encap.ns,      doc.timing.decap.ns,  doc.timing.forward.ns,
                 doc.timing.controller_proc.ns, doc.timing.detect.ns, doc.timing.reconfigure.ns};
  j["reliability"] = {doc.reliability.rto.ns, doc.reliability.max_retries};
  j["duration"] = ov.duration.value_or(doc.duration).ns;
  j["mode"] = ov.mode.value_or(doc.natural_mode()) == RunMode::Sdivn ? "sdivn" : "livn";
  j["seed"] = ov.seed;
  return hex64(fnv1a64(j.dump()));
}

RunResult run_scenario(const Document& doc, const RunOverrides& ov) {
  const RunMode natural = doc.natural_mode();
  const RunMode mode = ov.mode.value_or(natural);
  if (mode != natural) {
    throw ConfigError(doc.source, std::string("requested mode '") +
                                      (mode == RunMode::Sdivn ? "sdivn" : "livn") +
                                      "' does not match the document's topology");
  }
  RunResult res = mode == RunMode::Sdivn ? run_sdivn(doc, ov) : run_livn(doc, ov);
  res.config_hash = config_hash(doc, ov);
  return res;
}

std::vector<PairedFlowSummary> pair_runs(const RunResult& normal, const RunResult& failure) {
  if (normal.config_hash != failure.config_hash) {
    throw IncomparableRunsError("runs differ in more than the failure schedule (hash " +
                                normal.config_hash + " vs " + failure.config_hash + ")");
  }
  if (!normal.failures_applied.empty()) {
    throw IncomparableRunsError("the baseline leg ran with its own failure schedule");
  }
  std::vector<PairedFlowSummary> out;
  for (std::size_t i = 0; i < normal.flows.size(); ++i) {
    const int flow = static_cast<int>(i);
    const FlowAggregate n = aggregate(normal.records, flow);
    const FlowAggregate f = aggregate(failure.records, flow);
    PairedFlowSummary s;
    s.flow = normal.flows[i].name();
    s.k_normal = n.k;
    s.k_failure = f.k;
    s.tt_normal = n.total_transfer;
    s.tt_failure = f.total_transfer;
    s.attn_ns = n.att_ns();
    s.attf_ns = f.att_ns();
    s.afcp_ns = afcp_ns(s.attf_ns, s.attn_ns);
    s.afcp_pct = s.attn_ns > 0 ? s.afcp_ns / s.attn_ns * 100.0 : 0.0;
    s.afcp_numer_ns = n.k == f.k ? f.total_transfer.ns - n.total_transfer.ns : 0;
    out.push_back(std::move(s));
  }
  return out;
}

CompareResult run_compare(const Document& doc, const RunOverrides& ov) {
  RunOverrides base = ov;
  base.failures = std::vector<FailureSpec>{};
  RunOverrides failed = ov;
  if (!failed.failures) failed.failures = doc.failures;

  CompareResult cmp;
  cmp.normal = run_scenario(doc, base);
  cmp.failure = run_scenario(doc, failed);
  cmp.summaries = pair_runs(cmp.normal, cmp.failure);
  return cmp;
}

}  // namespace ivnsim
