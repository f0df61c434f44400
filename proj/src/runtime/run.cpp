#include "premlog/runtime/run.hpp"

#include <algorithm>
#include <cstdio>
#include <queue>

#include "detail.hpp"
#include "premlog/errors.hpp"
#include "premlog/fixpoint.hpp"
#include "premlog/hashing.hpp"
#include "premlog/prem.hpp"
#include "premlog/runtime/coordinator.hpp"
#include "premlog/runtime/stragglers.hpp"

namespace premlog {

namespace {

std::string format_time(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", t);
  return buf;
}

/// Discrete-event simulation of the worker protocol on a virtual clock.
/// Ties at one instant run sends first, then deliveries, then worker
/// decisions, so a decision sees every message that arrives at that instant.
class Simulation {
 public:
  Simulation(std::vector<WorkerState>& workers, const RunConfig& cfg,
             const std::optional<Constraint>& gamma, RunResult& out)
      : workers_(workers), cfg_(cfg), gamma_(gamma), out_(out), phase_(workers.size()) {
    if (cfg.straggler && !cfg.lockstep)
      stragglers_ = StragglerSchedule(*cfg.straggler, workers.size(), cfg.rng_seed);
    if (cfg.lockstep) out_.round_snapshots.resize(workers.size());
  }

  double run_phase(std::size_t stratum, double start) {
    const auto& preds = workers_.front().shard().program.strata().at(stratum);
    record_snapshots_ = cfg_.lockstep && gamma_ &&
                        std::find(preds.begin(), preds.end(), gamma_->predicate) != preds.end();
    in_flight_ = 0;
    for (std::size_t w = 0; w < workers_.size(); ++w) {
      workers_[w].begin_phase(stratum);
      phase_[w] = Phase::Deciding;
      push(start, Kind::Activate, w, {});
    }
    trace(start, 0, "phase", std::to_string(stratum));

    while (!queue_.empty()) {
      Event e = queue_.top();
      queue_.pop();
      switch (e.kind) {
        case Kind::ComputeDone:
          on_compute_done(e);
          break;
        case Kind::Deliver:
          on_deliver(e);
          break;
        case Kind::Activate:
          on_activate(e.worker, e.time);
          break;
      }
      std::vector<WorkerStatus> statuses;
      for (const auto& w : workers_) statuses.push_back(w.status());
      if (coordinator_step(statuses, in_flight_) == CoordinatorDecision::Terminate) {
        while (!queue_.empty()) queue_.pop();
        trace(e.time, 0, "terminate", "phase " + std::to_string(stratum));
        return e.time;
      }
    }
    throw DeadlockDetected("no events left while some workers are still running");
  }

 private:
  enum class Kind { ComputeDone = 0, Deliver = 1, Activate = 2 };
  enum class Phase { Deciding, Computing, Waiting, Finished };

  struct Event {
    double time;
    Kind kind;
    std::uint64_t seq;
    std::size_t worker;
    VersionedUpdate msg;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      if (a.kind != b.kind) return a.kind > b.kind;
      return a.seq > b.seq;
    }
  };

  void push(double time, Kind kind, std::size_t worker, VersionedUpdate msg) {
    queue_.push(Event{time, kind, seq_++, worker, std::move(msg)});
  }

  void trace(double t, std::size_t worker, const std::string& event, const std::string& detail) {
    if (!cfg_.trace) return;
    out_.trace.push_back(format_time(t) + " " + std::to_string(worker) + " " + event + " " + detail);
  }

  double latency(const VersionedUpdate& u) const {
    if (cfg_.lockstep) return 0.0;
    return cfg_.message_latency + cfg_.per_tuple_latency * static_cast<double>(u.payload.entries.size());
  }

  void on_compute_done(const Event& e) {
    const std::size_t w = e.worker;
    const VersionedUpdate& u = e.msg;
    if (record_snapshots_) out_.round_snapshots[w].push_back(workers_[w].snapshot(gamma_->predicate));
    if (cfg_.on_send) cfg_.on_send(u);
    trace(e.time, w, "send",
          "round=" + std::to_string(u.round) + " tuples=" + std::to_string(u.payload.entries.size()));
    for (std::size_t j = 0; j < workers_.size(); ++j) {
      if (j == w) continue;
      ++in_flight_;
      push(e.time + latency(u), Kind::Deliver, j, u);
    }
    phase_[w] = Phase::Deciding;
    push(e.time, Kind::Activate, w, {});
  }

  void on_deliver(const Event& e) {
    const std::size_t j = e.worker;
    --in_flight_;
    const bool wakes = !e.msg.finish_notice && !e.msg.empty();
    trace(e.time, j, e.msg.finish_notice ? "notice" : "recv",
          "from=" + std::to_string(e.msg.sender) +
              (e.msg.finish_notice ? std::string()
                                   : " round=" + std::to_string(e.msg.round) +
                                         " tuples=" + std::to_string(e.msg.payload.entries.size())));
    workers_[j].receive(e.msg);
    if (phase_[j] == Phase::Waiting) {
      push(e.time, Kind::Activate, j, {});
    } else if (phase_[j] == Phase::Finished && wakes) {
      phase_[j] = Phase::Deciding;
      workers_[j].set_status(WorkerStatus::Running);
      ++workers_[j].metrics().resumes;
      trace(e.time, j, "resume", "");
      push(e.time, Kind::Activate, j, {});
    }
  }

  void on_activate(std::size_t w, double now) {
    if (phase_[w] != Phase::Deciding && phase_[w] != Phase::Waiting) return;
    WorkerState& state = workers_[w];
    if (state.staleness() > cfg_.effective_slack()) {
      if (phase_[w] != Phase::Waiting) {
        phase_[w] = Phase::Waiting;
        wait_start_[w] = now;
        trace(now, w, "wait", "staleness=" + std::to_string(state.staleness()));
      }
      return;
    }
    if (phase_[w] == Phase::Waiting) state.metrics().wait_time += now - wait_start_[w];
    phase_[w] = Phase::Deciding;

    if (state.has_pending() || state.inbox_has_changes()) {
      start_round(w, now);
    } else {
      phase_[w] = Phase::Finished;
      state.set_status(WorkerStatus::Finished);
      trace(now, w, "finish", "round=" + std::to_string(state.round()));
      VersionedUpdate notice;
      notice.sender = w;
      notice.round = state.round();
      notice.finish_notice = true;
      for (std::size_t j = 0; j < workers_.size(); ++j) {
        if (j == w) continue;
        ++in_flight_;
        push(now + latency(notice), Kind::Deliver, j, notice);
      }
    }
  }

  void start_round(std::size_t w, double now) {
    WorkerState& state = workers_[w];
    if (state.staleness() > cfg_.effective_slack())
      throw InvariantViolation("worker " + std::to_string(w) + " computed beyond the staleness bound");
    RoundStats stats;
    VersionedUpdate u = worker_local_round(state, cfg_, &stats);
    double end;
    if (cfg_.lockstep) {
      end = now + 1.0;
    } else {
      double work = 0.0;
      for (auto units : stats.work) work += static_cast<double>(units) + cfg_.iteration_overhead;
      end = stragglers_.finish_time(w, now, work * cfg_.unit_cost);
    }
    state.metrics().compute_time += end - now;
    phase_[w] = Phase::Computing;
    trace(now, w, "compute",
          "round=" + std::to_string(u.round) + " iterations=" + std::to_string(stats.iterations) +
              " incorporated=" + std::to_string(stats.incorporated));
    push(end, Kind::ComputeDone, w, std::move(u));
  }

  std::vector<WorkerState>& workers_;
  const RunConfig& cfg_;
  const std::optional<Constraint>& gamma_;
  RunResult& out_;
  StragglerSchedule stragglers_;

  std::vector<Phase> phase_;
  std::map<std::size_t, double> wait_start_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t seq_ = 0;
  std::size_t in_flight_ = 0;
  bool record_snapshots_ = false;
};

void check_disjoint(const std::vector<WorkerState>& workers) {
  const PartitionFn& f = workers.front().shard().partition;
  std::map<std::string, std::unordered_map<Tuple, std::size_t, TupleHash>> owner;
  for (const auto& w : workers) {
    for (const auto& [pred, rel] : w.local().relations()) {
      auto& seen = owner[pred];
      rel.for_each([&](const Tuple& t) {
        Tuple key = rel.keyed() ? rel.constraint()->key_of(t) : t;
        if (partition_tuple(f, pred, t) != w.id())
          throw InvariantViolation("worker " + std::to_string(w.id()) + " holds " + pred + "(" +
                                   format_tuple(t) + ") outside its partition");
        auto [it, inserted] = seen.emplace(std::move(key), w.id());
        if (!inserted)
          throw InvariantViolation("workers " + std::to_string(it->second) + " and " +
                                   std::to_string(w.id()) + " both hold a key of " + pred);
      });
    }
  }
}

RunResult run_sequential(const std::vector<PlanShard>& plan, const std::optional<Constraint>& gamma,
                         const RunConfig& cfg) {
  Program program = strip_guards(plan.front().program);
  EvalOptions opts;
  opts.iteration_cap = cfg.iteration_cap;
  FixpointResult fr = seminaive_fixpoint(program, plan.front().replicated_edb, gamma, opts);

  RunResult out;
  out.interpretation = std::move(fr.interpretation);
  WorkerMetrics m;
  m.id = 0;
  m.rounds = fr.iterations;
  m.local_iterations = fr.iterations;
  m.derivations_total = fr.derivations;
  m.derivations_discarded = fr.discarded;
  m.compute_time = (static_cast<double>(fr.derivations + fr.probes) +
                    cfg.iteration_overhead * static_cast<double>(fr.iterations)) *
                   cfg.unit_cost;
  out.per_worker.push_back(m);
  out.rounds = fr.iterations;
  out.run_time = m.compute_time;
  out.terminated_cleanly = true;
  return out;
}

}  // namespace

RunResult run(const std::vector<PlanShard>& plan, const std::optional<Constraint>& gamma,
              const RunConfig& cfg) {
  cfg.check();
  if (plan.empty()) throw ValidationError("empty plan");
  const PartitionFn& f = plan.front().partition;
  if (cfg.mode != Mode::Sequential && plan.size() != cfg.worker_count)
    throw ValidationError("plan has " + std::to_string(plan.size()) + " shards but " +
                          std::to_string(cfg.worker_count) + " workers were requested");
  for (std::size_t i = 0; i < plan.size(); ++i)
    if (plan[i].worker_id != i || plan[i].partition.worker_count != plan.size())
      throw ValidationError("plan shards are not numbered 0.." + std::to_string(plan.size() - 1));
  if (gamma) {
    DiscriminatingSet s{gamma->predicate, f.positions_for(gamma->predicate)};
    if (!partition_preserves_constraint(*gamma, s))
      throw ValidationError("precondition violated: the discriminating set of " + gamma->predicate +
                            " is not within the constraint's group-by positions");
  }

  if (cfg.mode == Mode::Sequential) {
    RunResult out = run_sequential(plan, gamma, cfg);
    out.result_checksum = result_checksum(out.interpretation);
    return out;
  }

  const Program& program = plan.front().program;
  auto constraints = program_constraints(program);
  if (gamma) constraints.insert_or_assign(gamma->predicate, *gamma);
  const auto exchanged = exchange_predicates(program, f);

  std::vector<WorkerState> workers;
  for (const auto& shard : plan) workers.emplace_back(shard, constraints, exchanged, cfg.iteration_cap);

  RunResult out;
  if (cfg.virtual_time) {
    Simulation sim(workers, cfg, gamma, out);
    double t = 0.0;
    for (std::size_t s = 0; s < program.strata().size(); ++s) t = sim.run_phase(s, t);
    out.run_time = t;
    out.terminated_cleanly = true;
  } else {
    detail::run_threaded(workers, cfg, out);
  }

  check_disjoint(workers);
  for (const auto& pred : program.idb_predicates()) {
    Relation& merged = out.interpretation.relation(pred, program.arity(pred));
    for (const auto& w : workers)
      if (const Relation* r = w.local().find(pred)) r->for_each([&](const Tuple& t) { merged.insert(t); });
  }
  for (const auto& w : workers) {
    out.per_worker.push_back(w.metrics());
    out.rounds = std::max(out.rounds, w.metrics().rounds);
  }

  if (cfg.verify) {
    EvalOptions opts;
    opts.iteration_cap = cfg.iteration_cap;
    FixpointResult seq = seminaive_fixpoint(strip_guards(program), plan.front().replicated_edb, gamma, opts);
    if (!(seq.interpretation == out.interpretation))
      throw InvariantViolation("union of worker results differs from the sequential fixpoint");
  }
  out.result_checksum = result_checksum(out.interpretation);
  return out;
}

std::uint64_t result_checksum(const Interpretation& i) {
  std::uint64_t acc = 0;
  for (const auto& [pred, rel] : i.relations()) {
    std::vector<Value> name(pred.begin(), pred.end());
    const std::uint64_t seed = stable_hash(name, 0);
    rel.for_each([&](const Tuple& t) { acc += stable_hash(t, seed); });
  }
  return acc;
}

bool is_gamma_cover(const Constraint& gamma, const std::vector<Tuple>& s1,
                    const std::vector<Tuple>& s2) {
  std::unordered_map<Tuple, std::vector<Value>, TupleHash> costs;
  for (const auto& t : s1) costs[gamma.key_of(t)].push_back(t[gamma.cost_position]);
  for (const auto& t : s2) {
    auto it = costs.find(gamma.key_of(t));
    if (it == costs.end()) return false;
    std::size_t matches = 0;
    for (Value c : it->second)
      if (gamma.best(c, t[gamma.cost_position]) == c) ++matches;
    if (matches != 1) return false;
  }
  return true;
}

CoverReport check_round_cover(const RunResult& ssp, const RunResult& bsp, const Constraint& gamma) {
  CoverReport report;
  const auto& a = ssp.round_snapshots;
  const auto& b = bsp.round_snapshots;
  if (a.size() != b.size()) throw ValidationError("runs have different worker counts");
  auto at = [](const std::vector<std::vector<Tuple>>& snaps, std::size_t r) -> const std::vector<Tuple>& {
    static const std::vector<Tuple> kNone;
    if (snaps.empty() || r == 0) return kNone;
    return snaps[std::min(r, snaps.size()) - 1];
  };
  for (std::size_t w = 0; w < a.size(); ++w) {
    std::size_t rounds = std::max(a[w].size(), b[w].size());
    for (std::size_t r = 1; r <= rounds; ++r) {
      ++report.comparisons;
      if (!is_gamma_cover(gamma, at(a[w], r), at(b[w], r))) {
        if (report.violations++ == 0)
          report.first_violation = "worker " + std::to_string(w) + " round " + std::to_string(r);
      }
    }
  }
  return report;
}

}  // namespace premlog
