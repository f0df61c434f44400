#pragma once

#include <cstddef>
#include <vector>

#include "premlog/runtime/worker.hpp"

namespace premlog {

enum class CoordinatorDecision { Continue, Terminate };

/// Quiescence test: every worker reported finish, no resume is outstanding
/// and no message is in transit (a message in transit may still wake a
/// finished worker).
CoordinatorDecision coordinator_step(const std::vector<WorkerStatus>& statuses,
                                     std::size_t in_flight, bool resume_pending = false);

}  // namespace premlog
