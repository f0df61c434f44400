#include "premlog/relation.hpp"

#include <algorithm>

#include "premlog/errors.hpp"

namespace premlog {

Constraint Constraint::from_aggregate(const std::string& predicate, const AggregateHead& agg) {
  return Constraint{predicate, agg.kind, agg.groupby_positions, agg.cost_position};
}

Tuple Constraint::key_of(const Tuple& t) const {
  Tuple key;
  key.reserve(groupby_positions.size());
  for (auto p : groupby_positions) key.push_back(t[p]);
  return key;
}

bool Constraint::covers(std::size_t arity) const {
  return groupby_positions.size() + 1 == arity;
}

void Constraint::check(std::size_t arity) const {
  std::vector<bool> used(arity, false);
  auto take = [&](std::size_t p) {
    if (p >= arity || used[p])
      throw ValidationError("constraint on " + predicate + " has an invalid or repeated position " +
                            std::to_string(p));
    used[p] = true;
  };
  for (auto p : groupby_positions) take(p);
  take(cost_position);
}

Relation::Relation(std::size_t arity, Constraint gamma) : arity_(arity) {
  gamma.check(arity);
  if (!gamma.covers(arity))
    throw ValidationError("keyed relation for " + gamma.predicate +
                          " needs group-by and cost to cover every argument");
  constraint_ = std::move(gamma);
}

InsertOutcome Relation::insert(const Tuple& t) {
  if (!keyed()) return {set_.insert(t).second, ChangeKind::Inserted, std::nullopt};
  const Constraint& g = *constraint_;
  Tuple key = g.key_of(t);
  auto it = best_.find(key);
  if (it == best_.end()) {
    best_.emplace(std::move(key), t);
    return {true, ChangeKind::Inserted, std::nullopt};
  }
  Value old = it->second[g.cost_position];
  if (!g.better(t[g.cost_position], old)) return {};
  it->second = t;
  return {true, ChangeKind::Improved, old};
}

bool Relation::contains(const Tuple& t) const {
  if (!keyed()) return set_.count(t) > 0;
  auto it = best_.find(constraint_->key_of(t));
  return it != best_.end() && it->second == t;
}

std::optional<Value> Relation::cost_of(const Tuple& key) const {
  if (!keyed()) return std::nullopt;
  auto it = best_.find(key);
  if (it == best_.end()) return std::nullopt;
  return it->second[constraint_->cost_position];
}

std::vector<Tuple> Relation::tuples() const {
  std::vector<Tuple> out;
  out.reserve(size());
  for_each([&](const Tuple& t) { out.push_back(t); });
  return out;
}

std::vector<Tuple> Relation::sorted() const {
  auto out = tuples();
  std::sort(out.begin(), out.end());
  return out;
}

bool Relation::operator==(const Relation& other) const {
  if (size() != other.size()) return false;
  bool same = true;
  for_each([&](const Tuple& t) {
    if (same && !other.contains(t)) same = false;
  });
  return same;
}

Relation& Interpretation::relation(const std::string& predicate, std::size_t arity) {
  auto it = relations_.find(predicate);
  if (it == relations_.end()) it = relations_.emplace(predicate, Relation(arity)).first;
  return it->second;
}

void Interpretation::set(const std::string& predicate, Relation r) {
  relations_.insert_or_assign(predicate, std::move(r));
}

const Relation* Interpretation::find(const std::string& predicate) const {
  auto it = relations_.find(predicate);
  return it == relations_.end() ? nullptr : &it->second;
}

std::size_t Interpretation::size() const {
  std::size_t n = 0;
  for (const auto& [_, r] : relations_) n += r.size();
  return n;
}

bool Interpretation::operator==(const Interpretation& other) const {
  auto covered = [](const Interpretation& a, const Interpretation& b) {
    for (const auto& [name, rel] : a.relations_) {
      const Relation* o = b.find(name);
      if (!o) {
        if (!rel.empty()) return false;
      } else if (!(rel == *o)) {
        return false;
      }
    }
    return true;
  };
  return covered(*this, other) && covered(other, *this);
}

Interpretation interpretation_of(const RelationStore& edb) {
  Interpretation i;
  for (const auto& name : edb.predicates()) {
    Relation& r = i.relation(name, edb.arity(name));
    for (const auto& t : edb.tuples(name)) r.insert(t);
  }
  return i;
}

std::vector<Tuple> Delta::tuples_of(const std::string& predicate) const {
  std::vector<Tuple> out;
  for (const auto& e : entries)
    if (e.predicate == predicate) out.push_back(e.tuple);
  return out;
}

void DeltaBuilder::record(const std::string& predicate, const Relation& rel, const Tuple& t,
                          const InsertOutcome& outcome) {
  if (!outcome.changed) return;
  Tuple key = rel.keyed() ? rel.constraint()->key_of(t) : t;
  auto& idx = index_[predicate];
  auto it = idx.find(key);
  if (it == idx.end()) {
    idx.emplace(std::move(key), entries_.size());
    entries_.push_back({predicate, t, outcome.kind, outcome.old_cost});
  } else {
    // A key first inserted and then improved within one iteration stays an
    // insertion; a key improved twice keeps its oldest cost.
    entries_[it->second].tuple = t;
  }
}

Delta DeltaBuilder::finish(std::size_t iteration) {
  Delta d{iteration, std::move(entries_)};
  entries_.clear();
  index_.clear();
  return d;
}

std::vector<Tuple> reduce_tuples(const Constraint& gamma, const std::vector<Tuple>& tuples) {
  std::unordered_map<Tuple, Value, TupleHash> best;
  for (const auto& t : tuples) {
    Value c = t[gamma.cost_position];
    auto [it, inserted] = best.emplace(gamma.key_of(t), c);
    if (!inserted) it->second = gamma.best(it->second, c);
  }
  std::vector<Tuple> out;
  for (const auto& t : tuples)
    if (best.at(gamma.key_of(t)) == t[gamma.cost_position]) out.push_back(t);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace premlog
