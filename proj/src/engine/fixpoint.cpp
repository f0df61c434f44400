#include "premlog/fixpoint.hpp"

#include <set>

#include "premlog/errors.hpp"
#include "premlog/evaluator.hpp"

namespace premlog {

std::map<std::string, Constraint> program_constraints(const Program& p) {
  std::map<std::string, Constraint> out;
  for (const auto& pred : p.idb_predicates())
    if (auto agg = p.aggregate_of(pred)) out.emplace(pred, Constraint::from_aggregate(pred, *agg));
  return out;
}

namespace {

const RelationView& empty_view() {
  static const RelationView kEmpty;
  return kEmpty;
}

}  // namespace

Interpretation immediate_consequence(const Program& p, const Interpretation& i,
                                     const std::optional<GuardHash>& guard_hash) {
  std::map<std::string, RelationView> views;
  for (const auto& [name, rel] : i.relations()) views.emplace(name, RelationView::of(rel));

  Interpretation out;
  for (const auto& pred : p.idb_predicates()) {
    Relation& r = out.relation(pred, p.arity(pred));
    if (const Relation* prev = i.find(pred)) prev->for_each([&](const Tuple& t) { r.insert(t); });
  }
  for (const auto& rule : p.rules()) {
    CompiledRule cr = compile_rule(rule);
    std::vector<const RelationView*> sources;
    for (const auto& atom : cr.atoms) {
      auto it = views.find(atom.predicate);
      sources.push_back(it == views.end() ? &empty_view() : &it->second);
    }
    Relation& target = out.relation(cr.head_predicate, cr.head.size());
    fire_rule(cr, sources, guard_hash ? &*guard_hash : nullptr,
              [&](const Tuple& t) { target.insert(t); });
  }
  return out;
}

Interpretation apply_constraint(const Constraint& gamma, const Interpretation& i) {
  Interpretation out = i;
  const Relation* r = i.find(gamma.predicate);
  if (!r) return out;
  gamma.check(r->arity());
  Relation reduced(r->arity());
  for (const auto& t : reduce_tuples(gamma, r->tuples())) reduced.insert(t);
  out.set(gamma.predicate, std::move(reduced));
  return out;
}

namespace {

enum class Strategy { Naive, SemiNaive };

class StratifiedRunner {
 public:
  StratifiedRunner(const Program& p, std::map<std::string, Constraint> constraints,
                   const EvalOptions& opts)
      : p_(p), constraints_(std::move(constraints)), opts_(opts) {
    if (opts_.guard_hash) guard_ = &*opts_.guard_hash;
  }

  FixpointResult run(const RelationStore& edb, Strategy strategy) {
    i_ = interpretation_of(edb);
    for (const auto& stratum : p_.strata()) run_stratum(stratum, strategy);

    FixpointResult result;
    for (const auto& pred : p_.idb_predicates()) {
      const Relation* r = i_.find(pred);
      result.interpretation.set(pred, r ? *r : Relation(p_.arity(pred)));
    }
    result.iterations = iterations_;
    result.derivations = derivations_;
    result.discarded = discarded_;
    result.probes = probes_;
    return result;
  }

 private:
  const RelationView& static_view(const std::string& pred) {
    auto it = static_views_.find(pred);
    if (it != static_views_.end()) return it->second;
    const Relation* r = i_.find(pred);
    if (!r) return empty_view();
    return static_views_.emplace(pred, RelationView::of(*r)).first->second;
  }

  void merge(const std::string& pred, const std::vector<Tuple>& tuples, DeltaBuilder& delta) {
    Relation& rel = i_.relation(pred, p_.arity(pred));
    for (const auto& t : tuples) {
      auto outcome = rel.insert(t);
      if (!outcome.changed) ++discarded_;
      delta.record(pred, rel, t, outcome);
    }
  }

  void fire(const CompiledRule& rule, const std::vector<const RelationView*>& sources,
            std::map<std::string, std::vector<Tuple>>& pending) {
    auto& out = pending[rule.head_predicate];
    FireStats s = fire_rule(rule, sources, guard_,
                            [&](const Tuple& t) { out.push_back(t); });
    derivations_ += s.derivations;
    probes_ += s.probes;
  }

  void run_stratum(const std::vector<std::string>& stratum, Strategy strategy) {
    std::set<std::string> members(stratum.begin(), stratum.end());
    bool recursive = false;
    for (const auto& pred : stratum) {
      recursive = recursive || p_.is_recursive(pred);
      auto c = constraints_.find(pred);
      if (c != constraints_.end()) {
        i_.set(pred, Relation(p_.arity(pred), c->second));
      } else {
        i_.relation(pred, p_.arity(pred));
      }
    }

    std::vector<CompiledRule> main_rules, copy_rules;
    for (const auto& rule : p_.rules()) {
      if (!members.count(rule.head.predicate)) continue;
      if (p_.mirror_predicates().count(rule.head.predicate))
        copy_rules.push_back(compile_rule(rule));
      else
        main_rules.push_back(compile_rule(rule));
    }

    if (!recursive) {
      std::map<std::string, std::vector<Tuple>> pending;
      for (const auto& rule : main_rules) {
        std::vector<const RelationView*> sources;
        for (const auto& atom : rule.atoms) sources.push_back(&static_view(atom.predicate));
        fire(rule, sources, pending);
      }
      DeltaBuilder delta;
      for (const auto& [pred, tuples] : pending) merge(pred, tuples, delta);
      ++iterations_;
      return;
    }

    std::map<std::string, RelationView> deltas;
    for (std::size_t iteration = 1;; ++iteration) {
      if (iteration > opts_.iteration_cap) throw IterationCapExceeded(opts_.iteration_cap);
      ++iterations_;

      std::map<std::string, RelationView> full;
      for (const auto& pred : members) full.emplace(pred, RelationView::of(*i_.find(pred)));
      auto source_of = [&](const std::string& pred) -> const RelationView* {
        auto it = full.find(pred);
        return it != full.end() ? &it->second : &static_view(pred);
      };

      std::map<std::string, std::vector<Tuple>> pending;
      for (const auto& rule : main_rules) {
        std::vector<const RelationView*> sources;
        for (const auto& atom : rule.atoms) sources.push_back(source_of(atom.predicate));
        if (strategy == Strategy::Naive || iteration == 1) {
          fire(rule, sources, pending);
          continue;
        }
        for (std::size_t j = 0; j < rule.atoms.size(); ++j) {
          auto d = deltas.find(rule.atoms[j].predicate);
          if (d == deltas.end() || d->second.size() == 0) continue;
          auto versioned = sources;
          versioned[j] = &d->second;
          fire(rule, versioned, pending);
        }
      }

      DeltaBuilder delta;
      for (const auto& [pred, tuples] : pending) merge(pred, tuples, delta);
      propagate_copies(copy_rules, delta);

      Delta d = delta.finish(iteration);
      if (opts_.on_iteration) opts_.on_iteration(i_, d);
      if (d.empty()) break;

      std::map<std::string, std::vector<Tuple>> changed;
      for (const auto& e : d.entries) changed[e.predicate].push_back(e.tuple);
      deltas.clear();
      for (auto& [pred, tuples] : changed) deltas.emplace(pred, RelationView(std::move(tuples)));
    }
  }

  // Mirrors are kept identical to their source within the same iteration, so
  // a mirrored plan takes exactly as many iterations as the original one.
  void propagate_copies(const std::vector<CompiledRule>& copy_rules, DeltaBuilder& delta) {
    if (copy_rules.empty()) return;
    std::size_t cursor = 0;
    while (cursor < delta.entries().size()) {
      std::size_t end = delta.entries().size();
      std::map<std::string, std::vector<Tuple>> fresh;
      for (std::size_t k = cursor; k < end; ++k)
        fresh[delta.entries()[k].predicate].push_back(delta.entries()[k].tuple);
      cursor = end;

      std::map<std::string, std::vector<Tuple>> pending;
      for (const auto& rule : copy_rules) {
        auto it = fresh.find(rule.atoms[0].predicate);
        if (it == fresh.end()) continue;
        RelationView view(it->second);
        fire(rule, {&view}, pending);
      }
      for (const auto& [pred, tuples] : pending) merge(pred, tuples, delta);
    }
  }

  const Program& p_;
  std::map<std::string, Constraint> constraints_;
  const EvalOptions& opts_;
  const GuardHash* guard_ = nullptr;

  Interpretation i_;
  std::map<std::string, RelationView> static_views_;
  std::size_t iterations_ = 0;
  std::uint64_t derivations_ = 0;
  std::uint64_t discarded_ = 0;
  std::uint64_t probes_ = 0;
};

std::map<std::string, Constraint> with_extra(const Program& p,
                                             const std::optional<Constraint>& gamma) {
  auto constraints = program_constraints(p);
  if (gamma) {
    if (!p.idb_predicates().count(gamma->predicate))
      throw ValidationError("constraint names " + gamma->predicate +
                            ", which no rule defines");
    gamma->check(p.arity(gamma->predicate));
    constraints.insert_or_assign(gamma->predicate, *gamma);
  }
  return constraints;
}

}  // namespace

FixpointResult naive_fixpoint(const Program& p, const RelationStore& edb,
                              const std::optional<Constraint>& gamma, const EvalOptions& opts) {
  return StratifiedRunner(p, with_extra(p, gamma), opts).run(edb, Strategy::Naive);
}

FixpointResult seminaive_fixpoint(const Program& p, const RelationStore& edb,
                                  const std::optional<Constraint>& gamma,
                                  const EvalOptions& opts) {
  return StratifiedRunner(p, with_extra(p, gamma), opts).run(edb, Strategy::SemiNaive);
}

FixpointResult stratified_eval(const Program& p, const RelationStore& edb,
                               const EvalOptions& opts) {
  if (!p.prem_pushed().empty())
    throw ValidationError("stratified evaluation needs a program without pushed constraints");
  for (const auto& [pred, _] : program_constraints(p))
    if (p.is_recursive(pred))
      throw ValidationError("aggregate on recursive predicate " + pred +
                            " is not stratified");
  return StratifiedRunner(p, program_constraints(p), opts).run(edb, Strategy::Naive);
}

}  // namespace premlog
