#pragma once

#include <vector>

#include "premlog/value.hpp"

namespace premlog::cli {

// Reference answers computed straight from the arc list with plain arrays,
// sharing no code with the evaluator. Results are sorted tuples.

/// (x, y, d): cheapest walk of one or more arcs from x to y. Weights must be
/// non-negative.
std::vector<Tuple> floyd_warshall_apsp(const std::vector<Tuple>& arcs);
std::vector<Tuple> dijkstra_apsp(const std::vector<Tuple>& arcs);
/// (x, y): y is reachable from x over one or more arcs.
std::vector<Tuple> warshall_closure(const std::vector<Tuple>& arcs);

}  // namespace premlog::cli
