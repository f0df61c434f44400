#include "premlog/runtime/worker.hpp"

#include "premlog/errors.hpp"

namespace premlog {

namespace {

Relation empty_relation(const Program& p, const std::map<std::string, Constraint>& constraints,
                        const std::string& pred) {
  auto c = constraints.find(pred);
  if (c != constraints.end()) return Relation(p.arity(pred), c->second);
  return Relation(p.arity(pred));
}

Tuple key_of(const Relation& rel, const Tuple& t) {
  return rel.keyed() ? rel.constraint()->key_of(t) : t;
}

}  // namespace

WorkerState::WorkerState(PlanShard shard, std::map<std::string, Constraint> constraints,
                         std::set<std::string> exchanged, std::size_t iteration_cap)
    : shard_(std::move(shard)),
      constraints_(std::move(constraints)),
      exchanged_(std::move(exchanged)),
      iteration_cap_(iteration_cap) {
  const Program& p = shard_.program;
  for (const auto& pred : p.idb_predicates()) {
    own_.set(pred, empty_relation(p, constraints_, pred));
    if (exchanged_.count(pred)) remote_.set(pred, empty_relation(p, constraints_, pred));
  }
  for (const auto& pred : shard_.replicated_edb.predicates()) {
    std::vector<Tuple> tuples(shard_.replicated_edb.tuples(pred).begin(),
                              shard_.replicated_edb.tuples(pred).end());
    base_views_.emplace(pred, RelationView(std::move(tuples)));
  }
  metrics_.id = id();
  last_received_.assign(worker_count(), 0);
  peer_finished_.assign(worker_count(), false);
}

void WorkerState::begin_phase(std::size_t stratum) {
  const Program& p = shard_.program;
  const auto& preds = p.strata().at(stratum);
  members_ = std::set<std::string>(preds.begin(), preds.end());
  recursive_ = p.is_recursive(preds.front());
  main_rules_.clear();
  copy_rules_.clear();
  for (const auto& rule : p.rules()) {
    if (!members_.count(rule.head.predicate)) continue;
    if (p.mirror_predicates().count(rule.head.predicate))
      copy_rules_.push_back(compile_rule(rule));
    else
      main_rules_.push_back(compile_rule(rule));
  }
  frozen_views_.clear();
  started_ = false;
  phase_iterations_ = 0;
  delta_.clear();
  dirty_.clear();
  round_ = 0;
  last_received_.assign(worker_count(), 0);
  peer_finished_.assign(worker_count(), false);
  inbox_.clear();
  status_ = WorkerStatus::Running;
}

std::size_t WorkerState::staleness() const {
  std::size_t worst = 0;
  for (std::size_t j = 0; j < worker_count(); ++j) {
    if (j == id() || peer_finished_[j]) continue;
    if (round_ > last_received_[j]) worst = std::max(worst, round_ - last_received_[j]);
  }
  return worst;
}

void WorkerState::receive(VersionedUpdate u) {
  if (u.sender >= worker_count() || u.sender == id())
    throw InvariantViolation("worker " + std::to_string(id()) + " got a message from sender " +
                             std::to_string(u.sender));
  if (u.finish_notice) {
    peer_finished_[u.sender] = true;
    return;
  }
  if (u.round <= last_received_[u.sender])
    throw InvariantViolation("rounds from worker " + std::to_string(u.sender) +
                             " are not increasing");
  last_received_[u.sender] = u.round;
  peer_finished_[u.sender] = false;
  inbox_.push_back(std::move(u));
}

bool WorkerState::inbox_has_changes() const {
  for (const auto& u : inbox_)
    if (!u.empty()) return true;
  return false;
}

std::vector<Tuple> WorkerState::snapshot(const std::string& predicate) const {
  const Relation* r = own_.find(predicate);
  return r ? r->sorted() : std::vector<Tuple>{};
}

std::size_t WorkerState::incorporate(bool barrier) {
  std::size_t changed = 0;
  std::vector<VersionedUpdate> later;
  for (auto& u : inbox_) {
    if (barrier && u.round > round_) {
      later.push_back(std::move(u));
      continue;
    }
    for (const auto& e : u.payload.entries) {
      if (!exchanged_.count(e.predicate))
        throw InvariantViolation("update carries non-exchanged predicate " + e.predicate);
      std::size_t owner = partition_tuple(shard_.partition, e.predicate, e.tuple);
      if (owner != u.sender || owner == id())
        throw InvariantViolation("disjointness violated: worker " + std::to_string(u.sender) +
                                 " sent " + e.predicate + "(" + format_tuple(e.tuple) +
                                 "), which belongs to worker " + std::to_string(owner));
      Relation& rel = remote_.relation(e.predicate, shard_.program.arity(e.predicate));
      if (rel.insert(e.tuple).changed) {
        ++changed;
        if (members_.count(e.predicate)) delta_[e.predicate][key_of(rel, e.tuple)] = e.tuple;
      }
    }
  }
  inbox_ = std::move(later);
  return changed;
}

const RelationView& WorkerState::view_of(const std::string& pred,
                                         std::map<std::string, RelationView>& cache) {
  auto base = base_views_.find(pred);
  if (base != base_views_.end()) return base->second;
  auto& store = members_.count(pred) ? cache : frozen_views_;
  auto it = store.find(pred);
  if (it != store.end()) return it->second;
  std::vector<Tuple> tuples;
  if (const Relation* r = own_.find(pred)) tuples = r->tuples();
  if (const Relation* r = remote_.find(pred))
    r->for_each([&](const Tuple& t) { tuples.push_back(t); });
  return store.emplace(pred, RelationView(std::move(tuples))).first->second;
}

void WorkerState::merge_own(const std::string& pred, const std::vector<Tuple>& tuples,
                            DeltaBuilder& d) {
  Relation& rel = own_.relation(pred, shard_.program.arity(pred));
  for (const auto& t : tuples) {
    auto outcome = rel.insert(t);
    if (!outcome.changed) ++metrics_.derivations_discarded;
    d.record(pred, rel, t, outcome);
  }
}

bool WorkerState::local_iteration(RoundStats& stats) {
  if (++phase_iterations_ > iteration_cap_) throw IterationCapExceeded(iteration_cap_);
  const GuardHash guard = shard_.partition.guard_hash();
  std::map<std::string, RelationView> cache;
  std::map<std::string, std::vector<Tuple>> pending;
  FireStats total;
  auto fire = [&](const CompiledRule& rule, const std::vector<const RelationView*>& sources) {
    auto& out = pending[rule.head_predicate];
    FireStats s = fire_rule(rule, sources, &guard, [&](const Tuple& t) { out.push_back(t); });
    total.derivations += s.derivations;
    total.probes += s.probes;
  };

  if (!started_) {
    started_ = true;
    for (const auto& rule : main_rules_) {
      std::vector<const RelationView*> sources;
      for (const auto& atom : rule.atoms) sources.push_back(&view_of(atom.predicate, cache));
      fire(rule, sources);
    }
  } else {
    std::map<std::string, RelationView> deltas;
    for (auto& [pred, by_key] : delta_) {
      std::vector<Tuple> tuples;
      for (auto& [key, t] : by_key) tuples.push_back(t);
      deltas.emplace(pred, RelationView(std::move(tuples)));
    }
    for (const auto& rule : main_rules_) {
      std::vector<const RelationView*> sources;
      for (const auto& atom : rule.atoms) sources.push_back(&view_of(atom.predicate, cache));
      for (std::size_t j = 0; j < rule.atoms.size(); ++j) {
        auto d = deltas.find(rule.atoms[j].predicate);
        if (d == deltas.end() || d->second.size() == 0) continue;
        auto versioned = sources;
        versioned[j] = &d->second;
        fire(rule, versioned);
      }
    }
  }
  delta_.clear();

  DeltaBuilder changes;
  for (const auto& [pred, tuples] : pending) merge_own(pred, tuples, changes);

  // Mirrors follow their source within the same iteration.
  std::size_t cursor = 0;
  while (!copy_rules_.empty() && cursor < changes.entries().size()) {
    std::size_t end = changes.entries().size();
    std::map<std::string, std::vector<Tuple>> fresh;
    for (std::size_t k = cursor; k < end; ++k)
      fresh[changes.entries()[k].predicate].push_back(changes.entries()[k].tuple);
    cursor = end;
    std::map<std::string, std::vector<Tuple>> copies;
    for (const auto& rule : copy_rules_) {
      auto it = fresh.find(rule.atoms[0].predicate);
      if (it == fresh.end()) continue;
      RelationView view(it->second);
      auto& out = copies[rule.head_predicate];
      FireStats s = fire_rule(rule, {&view}, &guard, [&](const Tuple& t) { out.push_back(t); });
      total.derivations += s.derivations;
      total.probes += s.probes;
    }
    for (const auto& [pred, tuples] : copies) merge_own(pred, tuples, changes);
  }

  for (const auto& e : changes.entries()) {
    const Relation& rel = *own_.find(e.predicate);
    Tuple key = key_of(rel, e.tuple);
    if (exchanged_.count(e.predicate)) dirty_[e.predicate][key] = e.tuple;
    delta_[e.predicate][std::move(key)] = e.tuple;
  }

  metrics_.derivations_total += total.derivations;
  ++metrics_.local_iterations;
  ++stats.iterations;
  stats.work.push_back(total.derivations + total.probes);
  return !changes.empty();
}

VersionedUpdate WorkerState::make_update() {
  VersionedUpdate u;
  u.sender = id();
  u.round = ++round_;
  for (auto& [pred, by_key] : dirty_) {
    auto& sent = last_sent_[pred];
    const Relation& rel = *own_.find(pred);
    for (auto& [key, t] : by_key) {
      DeltaEntry e{pred, t, ChangeKind::Inserted, std::nullopt};
      auto prev = sent.find(key);
      if (prev != sent.end()) {
        if (prev->second == t) continue;
        e.change = ChangeKind::Improved;
        if (rel.keyed()) e.old_cost = prev->second[rel.constraint()->cost_position];
        prev->second = t;
      } else {
        sent.emplace(key, t);
      }
      u.payload.entries.push_back(std::move(e));
    }
  }
  dirty_.clear();
  u.payload.iteration = u.round;

  std::size_t peers = worker_count() - 1;
  ++metrics_.rounds;
  metrics_.updates_sent += peers;
  metrics_.tuples_sent += peers * u.payload.entries.size();
  return u;
}

VersionedUpdate worker_local_round(WorkerState& state, const RunConfig& cfg, RoundStats* stats) {
  if (state.status() != WorkerStatus::Running)
    throw InvariantViolation("worker " + std::to_string(state.id()) + " ran a round while finished");
  RoundStats local;
  RoundStats& st = stats ? *stats : local;
  st.incorporated = state.incorporate(cfg.mode == Mode::Bsp);
  const std::size_t cap = cfg.effective_local_cap();
  bool changed = true;
  for (std::size_t s = 0; s < cap && changed;) {
    changed = state.local_iteration(st);
    ++s;
  }
  return state.make_update();
}

}  // namespace premlog
