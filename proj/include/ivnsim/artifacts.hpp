#pragma once

#include <cstdint>
#include <string>

#include "ivnsim/runner.hpp"

namespace ivnsim {

// Integer rational printed with fixed decimals (round half away from zero);
// keeps CSV output byte-stable without floating point.
std::string fixed_decimal(std::int64_t numer, std::int64_t denom, int decimals);

// Per-packet CSV: flow_id,seq,t_send_ns,t_recv_ns,t_p_ns,path_id,retransmitted,duplicate
std::string packets_csv(const RunResult& res);

// Per-flow summary CSV: flow_id,k,tt_d_ns,att_ns
std::string summary_csv(const RunResult& res);

// Paired summary CSV: flow_id,k,attn_p_ns,attf_p_ns,afcp_p_ns,afcp_pct
std::string compare_summary_csv(const std::vector<PairedFlowSummary>& summaries);

std::string control_log_text(const RunResult& res);
std::string meta_json(const RunResult& res);

// Writes packets.csv, summary.csv, control.log, tables.txt, meta.json.
void write_run_artifacts(const RunResult& res, const std::string& dir);

// Writes both legs under normal/ and failure/, plus the paired summary.csv.
void write_compare_artifacts(const CompareResult& cmp, const std::string& dir);

// Reads a completed run directory and emits, per flow, cumulative-delivery
// and inter-arrival series as tab-separated text files. Returns the number of
// flows emitted; throws ConfigError when the run artifacts are missing.
int write_plot_data(const std::string& run_dir);

}  // namespace ivnsim
