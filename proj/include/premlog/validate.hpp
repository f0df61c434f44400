#pragma once

#include <string>
#include <vector>

#include "premlog/ast.hpp"

namespace premlog {

enum class Linearity { Linear, NonLinear };

/// A set of mutually recursive predicates.
struct Clique {
  std::vector<std::string> predicates;
  /// Linear when every rule body has at most one atom from the clique,
  /// not counting mirror predicates.
  Linearity linearity = Linearity::Linear;
  std::vector<std::string> mirror_predicates;
};

struct ValidationReport {
  std::vector<std::vector<std::string>> strata;
  std::vector<Clique> cliques;

  const Clique* clique_of(const std::string& predicate) const;
};

/// Throws ValidationError when an aggregate sits inside recursion without a
/// `.prem` marker, or a `.prem` marker names a predicate that is not both
/// recursive and aggregated.
ValidationReport validate_program(const Program& p);

}  // namespace premlog
