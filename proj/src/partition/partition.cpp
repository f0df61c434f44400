#include "premlog/partition.hpp"

#include <algorithm>

#include "premlog/errors.hpp"
#include "premlog/validate.hpp"

namespace premlog {

std::vector<std::size_t> PartitionFn::positions_for(const std::string& predicate) const {
  auto it = overrides.find(predicate);
  if (it != overrides.end()) return it->second;
  if (predicate == discriminating.predicate) return discriminating.positions;
  return {0};
}

namespace {

Tuple project(const Tuple& t, const std::vector<std::size_t>& positions) {
  Tuple key;
  key.reserve(positions.size());
  for (auto p : positions) {
    if (p >= t.size())
      throw ValidationError("tuple of arity " + std::to_string(t.size()) +
                            " lacks discriminating position " + std::to_string(p));
    key.push_back(t[p]);
  }
  return key;
}

}  // namespace

std::size_t partition_tuple(const PartitionFn& f, const Tuple& t) {
  return bucket_of(project(t, f.discriminating.positions), f.seed, f.worker_count);
}

std::size_t partition_tuple(const PartitionFn& f, const std::string& predicate, const Tuple& t) {
  return bucket_of(project(t, f.positions_for(predicate)), f.seed, f.worker_count);
}

Program lockfree_plan(const Program& p, const PartitionFn& f) {
  if (f.worker_count == 0) throw ValidationError("worker count must be at least 1");
  ValidationReport report = validate_program(p);
  for (const auto& clique : report.cliques)
    if (clique.linearity == Linearity::NonLinear)
      throw ValidationError("clique of " + clique.predicates.front() +
                            " is non-linear; apply the decomposable rewrite first");

  std::vector<Rule> rules = p.rules();
  for (auto& r : rules) {
    const auto positions = f.positions_for(r.head.predicate);
    DiscriminatingSet{r.head.predicate, positions}.check(r.head.args.size());

    std::set<std::string> atom_vars;
    for (const auto& a : r.body)
      for (const auto& t : a.args)
        if (t.is_variable()) atom_vars.insert(t.name());

    PartitionGuard guard;
    for (auto pos : positions) {
      const Term& t = r.head.args[pos];
      if (t.is_variable() && !atom_vars.count(t.name()))
        throw ValidationError("guard-unbindable: " + t.name() + " in the head of " +
                              r.head.predicate + " is not bound by any body atom");
      guard.args.push_back(t);
    }
    r.guard = std::move(guard);
  }
  return Program::build(std::move(rules), p.prem_pushed(), p.symbols());
}

std::vector<PlanShard> rewrite_lockfree(const Program& p, const PartitionFn& f,
                                        const RelationStore& edb) {
  Program plan = lockfree_plan(p, f);
  auto shards = shard_edb(edb, f);
  std::vector<PlanShard> out;
  for (std::size_t i = 0; i < f.worker_count; ++i) {
    std::vector<Rule> rules = plan.rules();
    for (auto& r : rules) r.guard->worker = i;
    out.push_back(PlanShard{i, Program::build(std::move(rules), plan.prem_pushed(), plan.symbols()),
                            std::move(shards[i]), edb, f});
  }
  return out;
}

Program rewrite_decomposable_nonlinear(const Program& p) {
  ValidationReport report = validate_program(p);
  std::set<std::string> clique_members;
  bool nonlinear = false;
  for (const auto& clique : report.cliques) {
    if (clique.linearity != Linearity::NonLinear) continue;
    nonlinear = true;
    for (const auto& pred : clique.predicates)
      if (!p.mirror_predicates().count(pred)) clique_members.insert(pred);
  }
  if (!nonlinear) throw ValidationError("every recursive clique is already linear");

  std::vector<Rule> rules;
  std::set<std::string> mirrored;
  for (Rule r : p.rules()) {
    if (clique_members.count(r.head.predicate)) {
      bool first = true;
      for (auto& a : r.body) {
        if (!clique_members.count(a.predicate)) continue;
        if (first) {
          first = false;
          continue;
        }
        mirrored.insert(a.predicate);
        a.predicate += kMirrorSuffix;
      }
    }
    rules.push_back(std::move(r));
  }

  std::set<std::string> pushed = p.prem_pushed();
  for (const auto& pred : mirrored) {
    const std::string mirror = pred + kMirrorSuffix;
    if (p.has_predicate(mirror)) throw ValidationError("predicate " + mirror + " already exists");

    // Reuse the source head's variable names when they are distinct.
    const Rule* model = p.rules_for(pred).front();
    std::vector<Term> args = model->head.args;
    std::set<std::string> names;
    bool distinct = true;
    for (const auto& t : args) distinct = distinct && t.is_variable() && names.insert(t.name()).second;
    if (!distinct)
      for (std::size_t k = 0; k < args.size(); ++k) args[k] = Term::variable("V" + std::to_string(k));

    Rule copy;
    copy.head = Atom{mirror, args};
    copy.head_aggregate = p.aggregate_of(pred);
    copy.body = {Atom{pred, args}};

    std::size_t last = 0;
    for (std::size_t k = 0; k < rules.size(); ++k)
      if (rules[k].head.predicate == pred) last = k;
    rules.insert(rules.begin() + static_cast<std::ptrdiff_t>(last + 1), std::move(copy));
    if (pushed.count(pred)) pushed.insert(mirror);
  }
  return Program::build(std::move(rules), std::move(pushed), p.symbols());
}

std::vector<RelationStore> shard_edb(const RelationStore& store, const PartitionFn& f) {
  if (f.worker_count == 0) throw ValidationError("worker count must be at least 1");
  std::vector<RelationStore> shards(f.worker_count);
  for (const auto& pred : store.predicates()) {
    for (auto& s : shards) s.declare(pred, store.arity(pred));
    const auto positions = f.positions_for(pred);
    DiscriminatingSet{pred, positions}.check(store.arity(pred));
    for (const auto& t : store.tuples(pred))
      shards[bucket_of(project(t, positions), f.seed, f.worker_count)].insert(pred, t);
  }
  return shards;
}

Program strip_guards(const Program& p) {
  std::vector<Rule> rules = p.rules();
  for (auto& r : rules) r.guard.reset();
  return Program::build(std::move(rules), p.prem_pushed(), p.symbols());
}

std::set<std::string> exchange_predicates(const Program& plan, const PartitionFn& f) {
  std::set<std::string> out;
  for (const auto& r : plan.rules()) {
    if (!r.guard) continue;
    for (const auto& a : r.body) {
      if (!plan.idb_predicates().count(a.predicate)) continue;
      const auto positions = f.positions_for(a.predicate);
      bool local = positions.size() == r.guard->args.size();
      for (std::size_t k = 0; local && k < positions.size(); ++k)
        local = positions[k] < a.args.size() && a.args[positions[k]] == r.guard->args[k];
      if (!local) out.insert(a.predicate);
    }
  }
  return out;
}

}  // namespace premlog
