#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "premlog/constraint.hpp"
#include "premlog/edb.hpp"
#include "premlog/value.hpp"

namespace premlog {

enum class ChangeKind { Inserted, Improved };

struct InsertOutcome {
  bool changed = false;
  ChangeKind kind = ChangeKind::Inserted;
  std::optional<Value> old_cost;
};

/// One predicate's facts. Plain relations are tuple sets; keyed relations hold
/// exactly one tuple (the best cost) per group-by key, so the half functional
/// dependency of their constraint holds by construction.
class Relation {
 public:
  explicit Relation(std::size_t arity = 0) : arity_(arity) {}
  Relation(std::size_t arity, Constraint gamma);

  std::size_t arity() const { return arity_; }
  bool keyed() const { return constraint_.has_value(); }
  const std::optional<Constraint>& constraint() const { return constraint_; }

  /// Set insertion for plain relations; keep-if-better for keyed ones.
  /// Equal-cost rederivations are not changes.
  InsertOutcome insert(const Tuple& t);
  bool contains(const Tuple& t) const;
  std::optional<Value> cost_of(const Tuple& key) const;
  std::size_t size() const { return keyed() ? best_.size() : set_.size(); }
  bool empty() const { return size() == 0; }

  template <class F>
  void for_each(F&& f) const {
    if (keyed()) {
      for (const auto& [key, t] : best_) f(t);
    } else {
      for (const auto& t : set_) f(t);
    }
  }
  std::vector<Tuple> tuples() const;
  std::vector<Tuple> sorted() const;

  /// Same set of facts, regardless of representation.
  bool operator==(const Relation& other) const;

 private:
  std::size_t arity_;
  std::optional<Constraint> constraint_;
  std::unordered_set<Tuple, TupleHash> set_;
  std::unordered_map<Tuple, Tuple, TupleHash> best_;
};

class Interpretation {
 public:
  /// Existing relation, or a new empty plain one.
  Relation& relation(const std::string& predicate, std::size_t arity);
  void set(const std::string& predicate, Relation r);
  const Relation* find(const std::string& predicate) const;
  bool contains(const std::string& predicate) const { return find(predicate) != nullptr; }
  void erase(const std::string& predicate) { relations_.erase(predicate); }

  const std::map<std::string, Relation>& relations() const { return relations_; }
  std::size_t size() const;

  /// Predicate-wise fact equality; a missing predicate equals an empty one.
  bool operator==(const Interpretation& other) const;

 private:
  std::map<std::string, Relation> relations_;
};

Interpretation interpretation_of(const RelationStore& edb);

struct DeltaEntry {
  std::string predicate;
  Tuple tuple;
  ChangeKind change = ChangeKind::Inserted;
  std::optional<Value> old_cost;
};

/// Changes made by one iteration, at most one entry per fact key.
struct Delta {
  std::size_t iteration = 0;
  std::vector<DeltaEntry> entries;

  bool empty() const { return entries.empty(); }
  std::vector<Tuple> tuples_of(const std::string& predicate) const;
};

/// Accumulates an iteration's changes, folding repeated changes to one key.
class DeltaBuilder {
 public:
  void record(const std::string& predicate, const Relation& rel, const Tuple& t,
              const InsertOutcome& outcome);
  Delta finish(std::size_t iteration);
  bool empty() const { return entries_.empty(); }
  const std::vector<DeltaEntry>& entries() const { return entries_; }

 private:
  std::vector<DeltaEntry> entries_;
  std::map<std::string, std::unordered_map<Tuple, std::size_t, TupleHash>> index_;
};

/// Keep, per group-by key, the tuples with the best cost, so the result
/// satisfies the min/max half functional dependency. Works for any coverage.
std::vector<Tuple> reduce_tuples(const Constraint& gamma, const std::vector<Tuple>& tuples);

}  // namespace premlog
