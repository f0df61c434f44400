#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "premlog/ast.hpp"
#include "premlog/constraint.hpp"
#include "premlog/edb.hpp"
#include "premlog/relation.hpp"

namespace premlog {

struct PremCounterexample {
  /// The interpretation at which the two sides differ.
  Interpretation snapshot;
  /// A tuple in exactly one of gamma(T(I)) and gamma(T(gamma(I))).
  Tuple tuple;
  /// True when `tuple` is on the gamma(T(I)) side.
  bool in_unpruned = false;
};

struct PremReport {
  Constraint constraint;
  bool holds = true;
  std::size_t iterations_checked = 0;
  std::optional<PremCounterexample> counterexample;
};

/// Positions of a predicate that the hash partition reads.
struct DiscriminatingSet {
  std::string predicate;
  std::vector<std::size_t> positions;

  /// Throws ValidationError when empty or outside `arity`.
  void check(std::size_t arity) const;
  bool operator==(const DiscriminatingSet&) const = default;
};

/// Run the naive constrained fixpoint on `edb` and, at every step, compare
/// gamma(T(I)) with gamma(T(gamma(I))) for the unreduced interpretation
/// I = T(I_n) and for I_n itself. Stops at the first difference. This checks
/// one database, it proves nothing in general.
PremReport check_prem_on_trace(const Program& p, const Constraint& gamma, const RelationStore& edb,
                               std::size_t iteration_cap = 1'000'000);

/// No two tuples of gamma's predicate share a group-by key with different
/// costs. Keyed stores with the same constraint pass by construction, and a
/// store without the predicate passes vacuously.
bool check_half_fd(const Interpretation& store, const Constraint& gamma);

/// Move a stratified min/max (an aggregate copy of a recursive predicate in a
/// higher stratum) onto the recursive predicate's rules, mark it pushed and
/// turn the upper rule into a plain copy. Purely syntactic. `gamma` may name
/// either the upper predicate or the recursive one.
Program push_constraint(const Program& p, const Constraint& gamma);

/// Partitioning on `s` preserves gamma's half-FD when s is within the
/// group-by positions.
bool partition_preserves_constraint(const Constraint& gamma, const DiscriminatingSet& s);

}  // namespace premlog
