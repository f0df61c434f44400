#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "premlog/ast.hpp"
#include "premlog/constraint.hpp"
#include "premlog/edb.hpp"
#include "premlog/hashing.hpp"
#include "premlog/relation.hpp"

namespace premlog {

struct EvalOptions {
  std::size_t iteration_cap = 1'000'000;
  /// Needed only for programs that carry partition guards.
  std::optional<GuardHash> guard_hash;
  /// Called after every iteration of a recursive stratum with the current
  /// interpretation and the changes that iteration made.
  std::function<void(const Interpretation&, const Delta&)> on_iteration;
};

struct FixpointResult {
  /// IDB relations only.
  Interpretation interpretation;
  /// Summed over strata; a non-recursive stratum counts as one.
  std::size_t iterations = 0;
  std::uint64_t derivations = 0;
  /// Derivations that changed nothing.
  std::uint64_t discarded = 0;
  std::uint64_t probes = 0;
};

/// Constraints implied by the program's aggregate heads.
std::map<std::string, Constraint> program_constraints(const Program& p);

/// T(i) u i over the derived predicates, as plain sets with aggregates
/// ignored: every head fact derivable in one step, with all its costs.
/// `i` must contain the base relations.
Interpretation immediate_consequence(const Program& p, const Interpretation& i,
                                     const std::optional<GuardHash>& guard_hash = std::nullopt);

/// gamma(I): keep the best-cost tuples of the constrained predicate.
Interpretation apply_constraint(const Constraint& gamma, const Interpretation& i);

/// Iterate I <- gamma(T(I)) stratum by stratum until nothing changes. The
/// extra `gamma` joins (or replaces) the program's own aggregate constraints.
FixpointResult naive_fixpoint(const Program& p, const RelationStore& edb,
                              const std::optional<Constraint>& gamma = std::nullopt,
                              const EvalOptions& opts = {});

/// Same result as `naive_fixpoint`, with every rule version after the first
/// iteration reading the previous iteration's changes in one recursive atom.
FixpointResult seminaive_fixpoint(const Program& p, const RelationStore& edb,
                                  const std::optional<Constraint>& gamma = std::nullopt,
                                  const EvalOptions& opts = {});

/// Reference semantics of a stratified program: aggregates only apply after
/// their input stratum is complete. Rejects programs with pushed constraints.
FixpointResult stratified_eval(const Program& p, const RelationStore& edb,
                               const EvalOptions& opts = {});

}  // namespace premlog
