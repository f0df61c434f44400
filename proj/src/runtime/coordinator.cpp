#include "premlog/runtime/coordinator.hpp"

#include <algorithm>

namespace premlog {

CoordinatorDecision coordinator_step(const std::vector<WorkerStatus>& statuses,
                                     std::size_t in_flight, bool resume_pending) {
  bool all_finished = std::all_of(statuses.begin(), statuses.end(),
                                  [](WorkerStatus s) { return s == WorkerStatus::Finished; });
  if (all_finished && !resume_pending && in_flight == 0) return CoordinatorDecision::Terminate;
  return CoordinatorDecision::Continue;
}

}  // namespace premlog
