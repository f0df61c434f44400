#pragma once

#include <vector>

#include "premlog/runtime/run.hpp"
#include "premlog/runtime/worker.hpp"

namespace premlog::detail {

/// Wall-clock execution: one thread per worker plus a coordinator thread.
/// Fills metrics, run_time and terminated_cleanly in `out`.
void run_threaded(std::vector<WorkerState>& workers, const RunConfig& cfg, RunResult& out);

}  // namespace premlog::detail
