#include "ivnsim/artifacts.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ivnsim {

namespace fs = std::filesystem;

std::string fixed_decimal(std::int64_t numer, std::int64_t denom, int decimals) {
  __int128 scale = 1;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  __int128 n = static_cast<__int128>(numer) * scale;
  const __int128 d = denom;
  const bool neg = (n < 0) != (d < 0) && n != 0;
  __int128 an = n < 0 ? -n : n;
  const __int128 ad = d < 0 ? -d : d;
  __int128 q = (an + ad / 2) / ad;  // round half away from zero
  std::string digits;
  if (q == 0) digits = "0";
  while (q > 0) {
    digits += static_cast<char>('0' + static_cast<int>(q % 10));
    q /= 10;
  }
  std::reverse(digits.begin(), digits.end());
  while (digits.size() < static_cast<std::size_t>(decimals) + 1) digits.insert(0, "0");
  std::string out = neg ? "-" : "";
  out += digits.substr(0, digits.size() - static_cast<std::size_t>(decimals));
  if (decimals > 0) out += "." + digits.substr(digits.size() - static_cast<std::size_t>(decimals));
  return out;
}

std::string packets_csv(const RunResult& res) {
  std::vector<const ArrivalRecord*> rows;
  rows.reserve(res.records.size());
  for (const auto& r : res.records) rows.push_back(&r);
  std::sort(rows.begin(), rows.end(), [](const ArrivalRecord* a, const ArrivalRecord* b) {
    return std::tie(a->flow, a->seq) < std::tie(b->flow, b->seq);
  });

  std::string out = "flow_id,seq,t_send_ns,t_recv_ns,t_p_ns,path_id,retransmitted,duplicate\n";
  for (const ArrivalRecord* r : rows) {
    out += res.flows[static_cast<std::size_t>(r->flow)].name();
    out += "," + std::to_string(r->seq);
    out += "," + std::to_string(r->t_send.ns);
    out += "," + std::to_string(r->t_recv.ns);
    out += "," + std::to_string((r->t_recv - r->t_send).ns);
    out += "," + r->path_id;
    out += r->attempts > 1 ? ",1" : ",0";
    out += r->dup_count > 0 ? ",1" : ",0";
    out += "\n";
  }
  return out;
}

std::string summary_csv(const RunResult& res) {
  std::string out = "flow_id,k,tt_d_ns,att_ns\n";
  for (std::size_t i = 0; i < res.flows.size(); ++i) {
    std::uint64_t k = 0;
    std::int64_t tt = 0;
    for (const auto& r : res.records) {
      if (r.flow == static_cast<int>(i)) {
        ++k;
        tt += (r.t_recv - r.t_send).ns;
      }
    }
    out += res.flows[i].name() + "," + std::to_string(k) + "," + std::to_string(tt) + ",";
    out += k > 0 ? fixed_decimal(tt, static_cast<std::int64_t>(k), 3) : "nan";
    out += "\n";
  }
  return out;
}

std::string compare_summary_csv(const std::vector<PairedFlowSummary>& summaries) {
  std::string out = "flow_id,k,attn_p_ns,attf_p_ns,afcp_p_ns,afcp_pct\n";
  for (const auto& s : summaries) {
    const auto kn = static_cast<std::int64_t>(s.k_normal);
    const auto kf = static_cast<std::int64_t>(s.k_failure);
    out += s.flow + "," + std::to_string(s.k_failure);
    out += "," + fixed_decimal(s.tt_normal.ns, kn, 3);
    out += "," + fixed_decimal(s.tt_failure.ns, kf, 3);
    // afcp = ttf/kf - ttn/kn = (ttf*kn - ttn*kf) / (kf*kn)
    const std::int64_t num = s.tt_failure.ns * kn - s.tt_normal.ns * kf;
    out += "," + fixed_decimal(num, kf * kn, 3);
    // pct = 100 * afcp / attn = 100*num / (kf * ttn)
    out += "," + (s.tt_normal.ns > 0 ? fixed_decimal(100 * num, kf * s.tt_normal.ns, 6) : "nan");
    out += "\n";
  }
  return out;
}

std::string control_log_text(const RunResult& res) {
  std::string out;
  for (const auto& line : res.control_log) {
    out += line;
    out += "\n";
  }
  return out;
}

std::string meta_json(const RunResult& res) {
  nlohmann::json j;
  j["mode"] = res.mode == RunMode::Sdivn ? "sdivn" : "livn";
  j["duration_ns"] = res.duration.ns;
  j["seed"] = res.seed;
  j["config_hash"] = res.config_hash;
  for (const auto& f : res.failures_applied) {
    j["failures"].push_back({{"target", f.target}, {"at_ns", f.at.ns}});
  }
  for (std::size_t i = 0; i < res.flows.size(); ++i) {
    const auto& st = res.stats[i];
    j["flows"].push_back({{"flow_id", res.flows[i].name()},
                          {"period_ns", res.flows[i].period.ns},
                          {"generated", st.generated},
                          {"delivered", st.delivered},
                          {"lost", st.lost},
                          {"in_flight", st.in_flight()},
                          {"duplicates", st.duplicates},
                          {"retransmissions", st.retransmissions}});
  }
  if (res.storm.monitored) {
    j["storm"] = {{"offered_load", res.storm.offered_load},
                  {"peak_utilization", res.storm.peak_utilization},
                  {"first_duplicate_ns", res.storm.first_duplicate.ns},
                  {"outage_ns", res.storm.outage_at.ns},
                  {"duplicate_deliveries", res.storm.duplicate_deliveries}};
  }
  return j.dump(2) + "\n";
}

namespace {

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError(p.string(), "cannot write file");
  out << content;
}

std::string sanitize(const std::string& flow_name) {
  std::string s;
  for (char c : flow_name) {
    if (isalnum(static_cast<unsigned char>(c))) {
      s += c;
    } else if (!s.empty() && s.back() != '_') {
      s += '_';
    }
  }
  return s;
}

}  // namespace

void write_run_artifacts(const RunResult& res, const std::string& dir) {
  fs::create_directories(dir);
  write_file(fs::path(dir) / "packets.csv", packets_csv(res));
  write_file(fs::path(dir) / "summary.csv", summary_csv(res));
  write_file(fs::path(dir) / "control.log", control_log_text(res));
  write_file(fs::path(dir) / "tables.txt", res.table_snapshots);
  write_file(fs::path(dir) / "meta.json", meta_json(res));
}

void write_compare_artifacts(const CompareResult& cmp, const std::string& dir) {
  fs::create_directories(dir);
  write_run_artifacts(cmp.normal, (fs::path(dir) / "normal").string());
  write_run_artifacts(cmp.failure, (fs::path(dir) / "failure").string());
  write_file(fs::path(dir) / "summary.csv", compare_summary_csv(cmp.summaries));
}

int write_plot_data(const std::string& run_dir) {
  const fs::path packets = fs::path(run_dir) / "packets.csv";
  const fs::path meta = fs::path(run_dir) / "meta.json";
  if (!fs::exists(packets) || !fs::exists(meta)) {
    throw ConfigError(run_dir, "not a completed run directory (packets.csv/meta.json missing)");
  }

  nlohmann::json m;
  {
    std::ifstream in(meta);
    in >> m;
  }
  std::vector<std::string> flow_ids;
  if (m.contains("flows")) {
    for (const auto& f : m["flows"]) flow_ids.push_back(f["flow_id"].get<std::string>());
  }

  // flow -> sorted t_recv_ns
  std::map<std::string, std::vector<std::int64_t>> arrivals;
  for (const auto& id : flow_ids) arrivals[id] = {};
  {
    std::ifstream in(packets);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      std::stringstream ss(line);
      std::string flow, seq, t_send, t_recv;
      std::getline(ss, flow, ',');
      std::getline(ss, seq, ',');
      std::getline(ss, t_send, ',');
      std::getline(ss, t_recv, ',');
      arrivals[flow].push_back(std::stoll(t_recv));
    }
  }

  for (auto& [flow, times] : arrivals) {
    std::sort(times.begin(), times.end());
    std::string cum = "# t_recv_ns\tcumulative_delivered\n";
    std::string gaps = "# t_recv_ns\tinter_arrival_ns\n";
    std::int64_t n = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      ++n;
      cum += std::to_string(times[i]) + "\t" + std::to_string(n) + "\n";
      if (i > 0) {
        gaps += std::to_string(times[i]) + "\t" + std::to_string(times[i] - times[i - 1]) + "\n";
      }
    }
    write_file(fs::path(run_dir) / ("delivery_" + sanitize(flow) + ".tsv"), cum);
    write_file(fs::path(run_dir) / ("interarrival_" + sanitize(flow) + ".tsv"), gaps);
  }
  return static_cast<int>(arrivals.size());
}

}  // namespace ivnsim
