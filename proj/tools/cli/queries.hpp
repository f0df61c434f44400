#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "premlog/constraint.hpp"
#include "premlog/edb.hpp"
#include "premlog/partition.hpp"

namespace premlog::cli {

/// A program plus everything the driver needs to run it: the base relation
/// the input file fills, the predicate written to the result CSV, and the
/// min/max constraint (if any) the partition has to respect.
struct Workload {
  std::string name;
  Program program;
  std::string edb_predicate;
  std::string result_predicate;
  std::optional<Constraint> gamma;
};

/// "apsp-linear", "apsp-nonlinear" or "tc". Without `push_prem` the APSP
/// queries keep the min in a separate stratum over all path costs.
Workload builtin_query(std::string_view name, bool push_prem);

/// Workload from rule text. The base relation is the program's only base
/// predicate; the result is `result` or else the first predicate of the last
/// stratum. `gamma` comes from the aggregate of a recursive predicate.
Workload workload_from_text(std::string_view text, bool push_prem, const std::string& result = {});

/// Parses "pred:pos,pos". Positions are zero-based.
DiscriminatingSet parse_partition_spec(std::string_view text);

/// Partition on the first column of the constrained (or result) predicate,
/// with `extra` specs replacing it: the first becomes the discriminating set,
/// later ones override individual predicates.
PartitionFn default_partition(const Workload& w, std::size_t workers, std::uint64_t seed,
                              const std::vector<DiscriminatingSet>& extra = {});

/// Program handed to the partitioner: the decomposable rewrite for
/// non-linear recursion, the program itself otherwise.
Program plan_program(const Workload& w);

std::vector<PlanShard> make_plan(const Workload& w, const PartitionFn& f, const RelationStore& edb);

}  // namespace premlog::cli
