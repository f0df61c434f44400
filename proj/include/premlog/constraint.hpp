#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "premlog/ast.hpp"
#include "premlog/value.hpp"

namespace premlog {

/// A min/max constraint gamma over one predicate: for every group-by key keep
/// only the best cost. Positions outside group-by and cost are allowed (they
/// are carried along, as in a half functional dependency X -> A over a wider
/// relation) but the keyed store used during evaluation needs full coverage.
struct Constraint {
  std::string predicate;
  AggregateKind kind = AggregateKind::Min;
  std::vector<std::size_t> groupby_positions;
  std::size_t cost_position = 0;

  static Constraint from_aggregate(const std::string& predicate, const AggregateHead& agg);

  /// `a` is strictly better than `b`.
  bool better(Value a, Value b) const {
    return kind == AggregateKind::Min ? a < b : a > b;
  }
  Value best(Value a, Value b) const { return better(b, a) ? b : a; }

  Tuple key_of(const Tuple& t) const;
  bool covers(std::size_t arity) const;
  /// Throws ValidationError when positions are out of range or overlap.
  void check(std::size_t arity) const;

  bool operator==(const Constraint&) const = default;
};

}  // namespace premlog
