#pragma once

#include "ivnsim/runner.hpp"
#include "ivnsim/topology.hpp"

namespace ivnsim {

// Simulates the switched design: adapters encapsulate ECU messages, the
// OpenFlow-style backbone forwards them under controller-installed rules, and
// fast-failover groups recover locally from link failure.
RunResult run_sdivn(const Document& doc, const RunOverrides& ov);

}  // namespace ivnsim
