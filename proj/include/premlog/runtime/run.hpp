#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "premlog/constraint.hpp"
#include "premlog/partition.hpp"
#include "premlog/relation.hpp"
#include "premlog/runtime/config.hpp"
#include "premlog/runtime/worker.hpp"

namespace premlog {

struct RunResult {
  /// Union of the workers' own facts, every derived predicate.
  Interpretation interpretation;
  std::vector<WorkerMetrics> per_worker;
  /// Largest per-worker round count.
  std::size_t rounds = 0;
  bool terminated_cleanly = false;
  /// Virtual (or wall-clock) time at which the last phase terminated.
  double run_time = 0.0;
  std::uint64_t result_checksum = 0;
  /// Lockstep runs only: per worker, the constrained predicate's own facts
  /// after each of its sends in the constrained predicate's phase.
  std::vector<std::vector<std::vector<Tuple>>> round_snapshots;
  /// `<vtime> <worker> <event> <detail>` lines when tracing is on.
  std::vector<std::string> trace;
};

/// Execute a partitioned plan. Sequential mode evaluates the guard-free
/// program on one executor; BSP and SSP run one worker per shard under the
/// virtual-time scheduler (or real threads when `virtual_time` is off).
/// Afterwards the per-worker key sets are checked to be disjoint and, with
/// `verify`, their union is compared with a sequential evaluation; failures
/// throw InvariantViolation.
RunResult run(const std::vector<PlanShard>& plan, const std::optional<Constraint>& gamma,
              const RunConfig& cfg);

/// Order-independent 64-bit fold over every fact.
std::uint64_t result_checksum(const Interpretation& i);

/// `s1` is a gamma-cover of `s2`: every tuple of s2 has exactly one tuple in
/// s1 with the same group-by key and an equal or better cost.
bool is_gamma_cover(const Constraint& gamma, const std::vector<Tuple>& s1,
                    const std::vector<Tuple>& s2);

struct CoverReport {
  std::size_t comparisons = 0;
  std::size_t violations = 0;
  std::string first_violation;
};

/// Round-matched comparison of two lockstep runs of the same plan: after
/// every round r, each worker's SSP facts must cover its BSP facts. A worker
/// that has stopped sending keeps its last snapshot.
CoverReport check_round_cover(const RunResult& ssp, const RunResult& bsp, const Constraint& gamma);

}  // namespace premlog
