#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "premlog/ast.hpp"
#include "premlog/hashing.hpp"
#include "premlog/relation.hpp"
#include "premlog/value.hpp"

namespace premlog {

/// Immutable snapshot of a relation with hash indexes built on demand for
/// each combination of bound argument positions.
class RelationView {
 public:
  RelationView() = default;
  explicit RelationView(std::vector<Tuple> tuples) : tuples_(std::move(tuples)) {}
  static RelationView of(const Relation& r) { return RelationView(r.tuples()); }

  const std::vector<Tuple>& tuples() const { return tuples_; }
  std::size_t size() const { return tuples_.size(); }

  /// Indices of the tuples whose values at the positions in `mask` equal `key`
  /// (key values listed in increasing position order).
  const std::vector<std::uint32_t>& probe(std::uint64_t mask, const Tuple& key) const;

 private:
  using Index = std::unordered_map<Tuple, std::vector<std::uint32_t>, TupleHash>;
  std::vector<Tuple> tuples_;
  mutable std::unordered_map<std::uint64_t, Index> indexes_;
};

struct Slot {
  bool is_constant = false;
  Value value = 0;
  std::size_t var = 0;
};

struct CompiledAtom {
  std::string predicate;
  std::vector<Slot> args;
  /// Positions already determined when the atom is reached: constants and
  /// variables bound by earlier goals.
  std::uint64_t bound_mask = 0;
  std::vector<std::size_t> bound_positions;
  /// First occurrences of new variables.
  std::vector<std::pair<std::size_t, std::size_t>> binds;
  /// Later occurrences of a variable first bound inside this same atom.
  std::vector<std::pair<std::size_t, std::size_t>> repeats;
};

struct CompiledGoal {
  enum class Kind { Assign, CheckSum, Compare, Guard };
  Kind kind = Kind::Assign;
  std::size_t target = 0;
  std::vector<Slot> operands;
  CompareOp op = CompareOp::Eq;
  std::optional<std::size_t> worker;
};

/// A rule lowered to variable slots: body atoms are joined left to right and
/// every other goal runs as soon as its inputs are bound.
struct CompiledRule {
  Rule source;
  std::string head_predicate;
  std::vector<Slot> head;
  std::vector<CompiledAtom> atoms;
  /// goals_after[k] runs once atoms [0, k) are matched.
  std::vector<std::vector<CompiledGoal>> goals_after;
  std::size_t var_count = 0;
};

CompiledRule compile_rule(const Rule& r);

struct FireStats {
  std::uint64_t derivations = 0;
  std::uint64_t probes = 0;
};

using Emit = std::function<void(const Tuple&)>;

/// Evaluate one rule with `sources[k]` supplying the facts for body atom k.
/// Guards need `guard_hash`; sums that overflow throw ArithmeticOverflow.
FireStats fire_rule(const CompiledRule& rule, const std::vector<const RelationView*>& sources,
                    const GuardHash* guard_hash, const Emit& emit);

}  // namespace premlog
