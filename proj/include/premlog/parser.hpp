#pragma once

#include <string>
#include <string_view>

#include "premlog/ast.hpp"

namespace premlog {

/// Parses the rule language:
///
///   path(X, Y, min<D>) <- path(X, Z, Dxz), arc(Z, Y, Dzy), D = Dxz + Dzy.
///   .prem path.
///
/// `%` and `//` start line comments. `h(X) = i` (or `= 0`) is a partition
/// guard. Throws ParseError with line/column on syntax errors and
/// ValidationError on arity conflicts or unsafe rules.
Program parse_program(std::string_view text);

/// Canonical text form; `parse_program(print_program(p))` reproduces `p`.
std::string print_program(const Program& p);
std::string print_rule(const Rule& r, const SymbolTable* symbols = nullptr);

}  // namespace premlog
