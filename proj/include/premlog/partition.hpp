#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "premlog/ast.hpp"
#include "premlog/edb.hpp"
#include "premlog/hashing.hpp"
#include "premlog/prem.hpp"

namespace premlog {

inline constexpr const char* kMirrorSuffix = "__m1";

/// The hash h over a discriminating set, plus per-predicate position choices
/// for the other partitioned predicates of a plan (first column by default).
struct PartitionFn {
  DiscriminatingSet discriminating;
  std::size_t worker_count = 1;
  std::uint64_t seed = 0;
  std::map<std::string, std::vector<std::size_t>> overrides;

  std::vector<std::size_t> positions_for(const std::string& predicate) const;
  GuardHash guard_hash() const { return GuardHash{worker_count, seed}; }
};

/// Worker owning `t` under the primary discriminating set.
std::size_t partition_tuple(const PartitionFn& f, const Tuple& t);
/// Worker owning a tuple of `predicate` under that predicate's positions.
std::size_t partition_tuple(const PartitionFn& f, const std::string& predicate, const Tuple& t);

struct PlanShard {
  std::size_t worker_id = 0;
  /// Every derived-predicate rule carries `h(...) = worker_id`.
  Program program;
  /// This worker's slice of each base relation.
  RelationStore edb_shard;
  /// Full copy of every base relation; rule bodies read from here.
  RelationStore replicated_edb;
  /// The hash the guards were built with.
  PartitionFn partition;
};

/// Guarded plan with the symbolic worker id `i`.
Program lockfree_plan(const Program& p, const PartitionFn& f);

/// One shard per worker, each with guards fixed to its own id.
std::vector<PlanShard> rewrite_lockfree(const Program& p, const PartitionFn& f,
                                        const RelationStore& edb);

/// Replace every clique occurrence after the first in a recursive body with a
/// mirror predicate `<pred>__m1`, defined by a copy rule that keeps the
/// source's aggregate. Throws when every clique is already linear.
Program rewrite_decomposable_nonlinear(const Program& p);

/// Split each base relation by its discriminating positions.
std::vector<RelationStore> shard_edb(const RelationStore& store, const PartitionFn& f);

Program strip_guards(const Program& p);

/// Derived predicates some guarded rule reads at a key the rule's own worker
/// does not necessarily own; their facts must be exchanged between workers.
std::set<std::string> exchange_predicates(const Program& plan, const PartitionFn& f);

}  // namespace premlog
