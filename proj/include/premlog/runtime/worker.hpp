#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "premlog/constraint.hpp"
#include "premlog/evaluator.hpp"
#include "premlog/partition.hpp"
#include "premlog/relation.hpp"
#include "premlog/runtime/config.hpp"

namespace premlog {

/// One message between workers. Updates carry the net changes to the
/// sender's exchanged predicates since its previous send, one entry per key.
/// A finish notice tells peers to stop counting the sender for staleness.
struct VersionedUpdate {
  std::size_t sender = 0;
  std::size_t round = 0;
  Delta payload;
  bool finish_notice = false;

  bool empty() const { return payload.entries.empty(); }
};

enum class WorkerStatus { Running, Finished };

struct WorkerMetrics {
  std::size_t id = 0;
  double compute_time = 0.0;
  double wait_time = 0.0;
  std::size_t rounds = 0;
  std::size_t updates_sent = 0;
  std::size_t tuples_sent = 0;
  std::uint64_t derivations_total = 0;
  std::uint64_t derivations_discarded = 0;
  std::size_t local_iterations = 0;
  std::size_t resumes = 0;
};

struct RoundStats {
  std::size_t iterations = 0;
  /// Join work per local iteration: tuples probed plus head tuples derived.
  std::vector<std::uint64_t> work;
  std::size_t incorporated = 0;
};

/// A worker's private view: its own partition of every derived predicate,
/// the latest facts received from peers for exchanged predicates, and the
/// protocol counters r and r'_j.
class WorkerState {
 public:
  WorkerState(PlanShard shard, std::map<std::string, Constraint> constraints,
              std::set<std::string> exchanged, std::size_t iteration_cap);

  std::size_t id() const { return shard_.worker_id; }
  std::size_t worker_count() const { return shard_.partition.worker_count; }
  const PlanShard& shard() const { return shard_; }

  /// Reset the protocol counters and prepare to evaluate one stratum.
  void begin_phase(std::size_t stratum);
  bool phase_recursive() const { return recursive_; }

  std::size_t round() const { return round_; }
  std::size_t last_received(std::size_t peer) const { return last_received_.at(peer); }
  bool peer_finished(std::size_t peer) const { return peer_finished_.at(peer); }
  /// Largest r - r'_j over peers not known to be finished (0 without peers).
  std::size_t staleness() const;

  WorkerStatus status() const { return status_; }
  void set_status(WorkerStatus s) { status_ = s; }

  /// Record a delivered message; updates wait in the inbox until the next
  /// round starts. Throws InvariantViolation on out-of-order rounds.
  void receive(VersionedUpdate u);
  bool inbox_has_changes() const;
  /// Local work remains: the last local iteration changed something.
  bool has_pending() const { return !delta_.empty() || !started_; }

  /// Own facts of every derived predicate evaluated so far.
  const Interpretation& local() const { return own_; }
  std::vector<Tuple> snapshot(const std::string& predicate) const;

  WorkerMetrics& metrics() { return metrics_; }
  const WorkerMetrics& metrics() const { return metrics_; }

 private:
  friend VersionedUpdate worker_local_round(WorkerState& state, const RunConfig& cfg,
                                            RoundStats* stats);

  std::size_t incorporate(bool barrier);
  bool local_iteration(RoundStats& stats);
  VersionedUpdate make_update();
  void merge_own(const std::string& pred, const std::vector<Tuple>& tuples, DeltaBuilder& d);
  const RelationView& view_of(const std::string& pred, std::map<std::string, RelationView>& cache);

  PlanShard shard_;
  std::map<std::string, Constraint> constraints_;
  std::set<std::string> exchanged_;
  std::size_t iteration_cap_;

  Interpretation own_;
  Interpretation remote_;
  std::map<std::string, RelationView> base_views_;
  std::map<std::string, RelationView> frozen_views_;

  std::set<std::string> members_;
  bool recursive_ = false;
  std::vector<CompiledRule> main_rules_;
  std::vector<CompiledRule> copy_rules_;
  bool started_ = false;
  std::size_t phase_iterations_ = 0;

  /// Facts changed since they were last joined, by key, latest value.
  std::map<std::string, std::map<Tuple, Tuple>> delta_;
  /// Own exchanged facts changed since the last send, by key, latest value.
  std::map<std::string, std::map<Tuple, Tuple>> dirty_;
  std::map<std::string, std::unordered_map<Tuple, Tuple, TupleHash>> last_sent_;

  std::size_t round_ = 0;
  std::vector<std::size_t> last_received_;
  std::vector<bool> peer_finished_;
  std::vector<VersionedUpdate> inbox_;
  WorkerStatus status_ = WorkerStatus::Running;
  WorkerMetrics metrics_;
};

/// One outer round of a worker: fold delivered updates into the peer view,
/// run semi-naive local iterations until a local fixpoint or the local cap,
/// then emit the condensed update for this round (possibly empty; the round
/// counter advances either way). BSP only folds updates from rounds it has
/// already completed.
VersionedUpdate worker_local_round(WorkerState& state, const RunConfig& cfg,
                                   RoundStats* stats = nullptr);

}  // namespace premlog
