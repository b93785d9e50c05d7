// Command-line front end: run a scenario, run a paired normal/failure
// comparison, or emit plot-ready series from a completed run directory.
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ivnsim/artifacts.hpp"
#include "ivnsim/runner.hpp"

namespace {

using namespace ivnsim;

struct CommonArgs {
  std::string topology;
  double duration_s = -1;
  std::vector<std::string> failures;
  std::string mode;
  std::string out;
  std::uint64_t seed = 0;
};

std::vector<FailureSpec> parse_failures(const std::vector<std::string>& specs) {
  std::vector<FailureSpec> out;
  for (const auto& s : specs) {
    const auto at = s.rfind('@');
    if (at == std::string::npos || at == 0 || at + 1 >= s.size()) {
      throw ConfigError("--fail", "expected LINKID@SECONDS, got '" + s + "'");
    }
    FailureSpec f;
    f.target = s.substr(0, at);
    try {
      f.at = from_seconds(std::stod(s.substr(at + 1)));
    } catch (const std::exception&) {
      throw ConfigError("--fail", "bad failure time in '" + s + "'");
    }
    out.push_back(std::move(f));
  }
  return out;
}

RunOverrides make_overrides(const CommonArgs& args, bool strip_failures) {
  RunOverrides ov;
  if (args.duration_s > 0) ov.duration = from_seconds(args.duration_s);
  if (!args.failures.empty()) ov.failures = parse_failures(args.failures);
  if (strip_failures) ov.failures = std::vector<FailureSpec>{};
  if (args.mode == "sdivn") ov.mode = RunMode::Sdivn;
  if (args.mode == "livn") ov.mode = RunMode::Livn;
  ov.seed = args.seed;
  return ov;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool need_topology) {
  if (need_topology) {
    cmd->add_option("--topology", args.topology, "Topology document (JSON)")->required();
    cmd->add_option("--duration", args.duration_s, "Run duration in seconds");
    cmd->add_option("--fail", args.failures,
                    "Failure LINKID@SECONDS (repeatable; replaces the document's schedule)");
    cmd->add_option("--mode", args.mode, "sdivn|livn")
        ->check(CLI::IsMember({"sdivn", "livn"}));
    cmd->add_option("--seed", args.seed, "Deterministic seed for payload generation");
  }
  cmd->add_option("--out", args.out, "Output directory")->required();
}

void print_run_summary(const RunResult& res) {
  for (std::size_t i = 0; i < res.flows.size(); ++i) {
    const auto& st = res.stats[i];
    std::cout << st.name << ": generated=" << st.generated << " delivered=" << st.delivered
              << " lost=" << st.lost << " duplicates=" << st.duplicates
              << " retransmissions=" << st.retransmissions << "\n";
  }
}

int cmd_run(const CommonArgs& args) {
  const Document doc = load_document_from_file(args.topology);
  const RunResult res = run_scenario(doc, make_overrides(args, false));
  write_run_artifacts(res, args.out);
  print_run_summary(res);
  std::cout << "artifacts: " << args.out << "\n";
  return 0;
}

int cmd_compare(const CommonArgs& args) {
  const Document doc = load_document_from_file(args.topology);
  const CompareResult cmp = run_compare(doc, make_overrides(args, false));
  write_compare_artifacts(cmp, args.out);
  for (const auto& s : cmp.summaries) {
    std::cout << s.flow << ": attn=" << fixed_decimal(s.tt_normal.ns,
                                                      static_cast<std::int64_t>(s.k_normal), 3)
              << "ns attf=" << fixed_decimal(s.tt_failure.ns,
                                             static_cast<std::int64_t>(s.k_failure), 3)
              << "ns afcp=" << s.afcp_ns << "ns (" << s.afcp_pct << "% of attn)\n";
  }
  std::cout << "artifacts: " << args.out << "\n";
  return 0;
}

int cmd_plotdata(const CommonArgs& args) {
  const int flows = write_plot_data(args.out);
  std::cout << "series written for " << flows << " flow(s) in " << args.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"In-vehicle network failover simulator"};
  app.require_subcommand(1);

  CommonArgs run_args, cmp_args, plot_args;
  CLI::App* run = app.add_subcommand("run", "Run one scenario and write artifacts");
  add_common(run, run_args, true);
  CLI::App* cmp = app.add_subcommand("compare", "Run paired no-failure/failure legs");
  add_common(cmp, cmp_args, true);
  CLI::App* plot = app.add_subcommand("plotdata", "Emit plot series from a run directory");
  add_common(plot, plot_args, false);

  try {
    app.parse(argc, argv);
    if (run->parsed()) return cmd_run(run_args);
    if (cmp->parsed()) return cmd_compare(cmp_args);
    if (plot->parsed()) return cmd_plotdata(plot_args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ivnsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const ivnsim::IncomparableRunsError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime invariant violation: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
