#include "premlog/prem.hpp"

#include <algorithm>
#include <set>

#include "premlog/errors.hpp"
#include "premlog/fixpoint.hpp"

namespace premlog {

void DiscriminatingSet::check(std::size_t arity) const {
  if (positions.empty()) throw ValidationError("discriminating set for " + predicate + " is empty");
  for (auto p : positions)
    if (p >= arity)
      throw ValidationError("discriminating position " + std::to_string(p) + " outside " +
                            predicate + "/" + std::to_string(arity));
}

namespace {

std::vector<Tuple> sorted_tuples(const Interpretation& i, const std::string& pred) {
  const Relation* r = i.find(pred);
  return r ? r->sorted() : std::vector<Tuple>{};
}

Interpretation with_base(const Interpretation& idb, const Interpretation& base) {
  Interpretation out = base;
  for (const auto& [name, rel] : idb.relations()) out.set(name, rel);
  return out;
}

}  // namespace

PremReport check_prem_on_trace(const Program& p, const Constraint& gamma, const RelationStore& edb,
                               std::size_t iteration_cap) {
  if (!p.idb_predicates().count(gamma.predicate))
    throw ValidationError("constraint names " + gamma.predicate + ", which no rule defines");
  gamma.check(p.arity(gamma.predicate));

  PremReport report;
  report.constraint = gamma;
  if (!p.is_recursive(gamma.predicate)) {
    report.iterations_checked = 1;
    return report;
  }

  const auto& clique = p.strata()[p.stratum_of(gamma.predicate)];
  const Interpretation base = interpretation_of(edb);

  // Returns the first tuple where gamma(T(x)) and gamma(T(gamma(x))) differ.
  auto compare_at = [&](const Interpretation& x) -> std::optional<PremCounterexample> {
    Interpretation lhs = apply_constraint(gamma, immediate_consequence(p, x));
    Interpretation rhs = apply_constraint(gamma, immediate_consequence(p, apply_constraint(gamma, x)));
    for (const auto& pred : clique) {
      auto a = sorted_tuples(lhs, pred);
      auto b = sorted_tuples(rhs, pred);
      if (a == b) continue;
      std::vector<Tuple> only_a, only_b;
      std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(only_a));
      std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(only_b));
      PremCounterexample cx;
      cx.snapshot = x;
      if (!only_a.empty() && (only_b.empty() || only_a.front() < only_b.front())) {
        cx.tuple = only_a.front();
        cx.in_unpruned = true;
      } else {
        cx.tuple = only_b.front();
      }
      return cx;
    }
    return std::nullopt;
  };

  Interpretation current = base;
  for (std::size_t n = 1;; ++n) {
    if (n > iteration_cap) throw IterationCapExceeded(iteration_cap);
    report.iterations_checked = n;

    Interpretation unreduced = with_base(immediate_consequence(p, current), base);
    for (const Interpretation* x : {&current, &unreduced}) {
      if (auto cx = compare_at(*x)) {
        report.holds = false;
        report.counterexample = std::move(cx);
        return report;
      }
    }

    Interpretation next = apply_constraint(gamma, unreduced);
    if (next == current) return report;
    current = std::move(next);
  }
}

bool check_half_fd(const Interpretation& store, const Constraint& gamma) {
  const Relation* r = store.find(gamma.predicate);
  if (!r) return true;
  if (r->keyed() && *r->constraint() == gamma) return true;
  gamma.check(r->arity());
  std::unordered_map<Tuple, Value, TupleHash> cost;
  bool ok = true;
  r->for_each([&](const Tuple& t) {
    auto [it, inserted] = cost.emplace(gamma.key_of(t), t[gamma.cost_position]);
    if (!inserted && it->second != t[gamma.cost_position]) ok = false;
  });
  return ok;
}

namespace {

bool plain_copy_of_body(const Rule& r) {
  if (r.body.size() != 1 || !r.arithmetic.empty() || !r.comparisons.empty() || r.guard)
    return false;
  const Atom& src = r.body.front();
  if (src.args != r.head.args) return false;
  std::set<std::string> seen;
  for (const auto& t : src.args)
    if (!t.is_variable() || !seen.insert(t.name()).second) return false;
  return true;
}

bool same_positions(std::vector<std::size_t> a, std::vector<std::size_t> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

}  // namespace

Program push_constraint(const Program& p, const Constraint& gamma) {
  std::vector<std::size_t> matches;
  for (std::size_t k = 0; k < p.rules().size(); ++k) {
    const Rule& r = p.rules()[k];
    if (!r.head_aggregate || !plain_copy_of_body(r)) continue;
    const std::string& upper = r.head.predicate;
    const std::string& lower = r.body.front().predicate;
    if (!p.idb_predicates().count(lower) || !p.is_recursive(lower)) continue;
    if (p.stratum_of(lower) >= p.stratum_of(upper)) continue;
    if (gamma.predicate != upper && gamma.predicate != lower) continue;
    const AggregateHead& agg = *r.head_aggregate;
    if (agg.kind != gamma.kind || agg.cost_position != gamma.cost_position ||
        !same_positions(agg.groupby_positions, gamma.groupby_positions))
      continue;
    matches.push_back(k);
  }
  if (matches.empty())
    throw ValidationError("no stratified " + std::string(to_string(gamma.kind)) +
                          " aggregate matching the constraint on " + gamma.predicate);
  std::set<std::string> targets;
  for (auto k : matches) targets.insert(p.rules()[k].body.front().predicate);
  if (targets.size() > 1 || matches.size() > 1)
    throw ValidationError("constraint on " + gamma.predicate + " matches aggregates over " +
                          std::to_string(targets.size()) + " recursive predicates");

  Rule upper_rule = p.rules()[matches.front()];
  const std::string lower = upper_rule.body.front().predicate;
  AggregateHead agg = *upper_rule.head_aggregate;
  if (p.aggregate_of(lower))
    throw ValidationError(lower + " already carries an aggregate");

  std::vector<Rule> rules = p.rules();
  for (auto& r : rules) {
    if (r.head.predicate == lower) r.head_aggregate = agg;
  }
  rules[matches.front()].head_aggregate.reset();

  std::set<std::string> pushed = p.prem_pushed();
  pushed.insert(lower);
  return Program::build(std::move(rules), std::move(pushed), p.symbols());
}

bool partition_preserves_constraint(const Constraint& gamma, const DiscriminatingSet& s) {
  if (gamma.predicate != s.predicate)
    throw ValidationError("constraint is on " + gamma.predicate + " but the discriminating set is on " +
                          s.predicate);
  if (s.positions.empty()) throw ValidationError("discriminating set for " + s.predicate + " is empty");
  return std::all_of(s.positions.begin(), s.positions.end(), [&](std::size_t pos) {
    return std::find(gamma.groupby_positions.begin(), gamma.groupby_positions.end(), pos) !=
           gamma.groupby_positions.end();
  });
}

}  // namespace premlog
