#pragma once

#include "ivnsim/runner.hpp"
#include "ivnsim/topology.hpp"

namespace ivnsim {

// Simulates the legacy baseline: ECUs share broadcast bus segments, lowest
// arbitration id wins contention, bridges dumbly re-broadcast, and a severed
// bus partitions its members with no recovery.
RunResult run_livn(const Document& doc, const RunOverrides& ov);

}  // namespace ivnsim
