#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "premlog/value.hpp"

namespace premlog {

class Term {
 public:
  static Term variable(std::string name);
  static Term constant(Value v);

  bool is_variable() const { return std::holds_alternative<std::string>(v_); }
  bool is_constant() const { return !is_variable(); }
  const std::string& name() const { return std::get<std::string>(v_); }
  Value value() const { return std::get<Value>(v_); }

  bool operator==(const Term&) const = default;

 private:
  explicit Term(std::variant<std::string, Value> v) : v_(std::move(v)) {}
  std::variant<std::string, Value> v_;
};

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  bool operator==(const Atom&) const = default;
};

enum class AggregateKind { Min, Max };

const char* to_string(AggregateKind k);

struct AggregateHead {
  AggregateKind kind = AggregateKind::Min;
  std::size_t cost_position = 0;
  std::vector<std::size_t> groupby_positions;

  bool operator==(const AggregateHead&) const = default;
};

/// `target = a + b + ...`. When `target` is already bound the goal is a check.
struct Arithmetic {
  std::string target;
  std::vector<Term> addends;

  bool operator==(const Arithmetic&) const = default;
};

enum class CompareOp { Lt, Le, Eq };

struct Comparison {
  Term lhs;
  CompareOp op;
  Term rhs;

  bool operator==(const Comparison&) const = default;
};

/// `h(X, ...) = i`. A missing worker id is the symbolic `i` of an
/// unspecialized plan; concrete ids are filled in per shard.
struct PartitionGuard {
  std::vector<Term> args;
  std::optional<std::size_t> worker;

  bool operator==(const PartitionGuard&) const = default;
};

struct Rule {
  Atom head;
  std::optional<AggregateHead> head_aggregate;
  std::vector<Atom> body;
  std::vector<Arithmetic> arithmetic;
  std::vector<Comparison> comparisons;
  std::optional<PartitionGuard> guard;

  bool operator==(const Rule&) const = default;
};

/// Parsed and schema-checked rule set. Construct through `Program::build`,
/// which enforces fixed arity per predicate and rule safety, and computes the
/// EDB/IDB split and the stratification.
class Program {
 public:
  Program() = default;

  static Program build(std::vector<Rule> rules, std::set<std::string> prem_pushed = {},
                       SymbolTable symbols = {});

  const std::vector<Rule>& rules() const { return rules_; }
  const std::set<std::string>& prem_pushed() const { return prem_pushed_; }
  const std::set<std::string>& edb_predicates() const { return edb_; }
  const std::set<std::string>& idb_predicates() const { return idb_; }
  /// Strongly connected components of the IDB dependency graph in evaluation
  /// order; every predicate in stratum k depends only on strata <= k.
  const std::vector<std::vector<std::string>>& strata() const { return strata_; }
  const std::map<std::string, std::size_t>& arities() const { return arity_; }
  const SymbolTable& symbols() const { return symbols_; }
  SymbolTable& symbols() { return symbols_; }

  std::size_t arity(const std::string& predicate) const;
  bool has_predicate(const std::string& predicate) const;
  std::size_t stratum_of(const std::string& predicate) const;
  /// True when the predicate's stratum contains a dependency cycle.
  bool is_recursive(const std::string& predicate) const;
  std::vector<const Rule*> rules_for(const std::string& predicate) const;
  /// Aggregate annotation shared by every rule defining `predicate`.
  std::optional<AggregateHead> aggregate_of(const std::string& predicate) const;

  /// Predicates whose defining rules are all identity copies of another
  /// predicate in the same recursive stratum (the exchange mirrors produced by
  /// the decomposable rewrite).
  const std::set<std::string>& mirror_predicates() const { return mirrors_; }
  bool is_copy_rule(const Rule& r) const;

 private:
  void analyze();

  std::vector<Rule> rules_;
  std::set<std::string> prem_pushed_;
  SymbolTable symbols_;

  std::set<std::string> edb_;
  std::set<std::string> idb_;
  std::map<std::string, std::size_t> arity_;
  std::vector<std::vector<std::string>> strata_;
  std::map<std::string, std::size_t> stratum_index_;
  std::set<std::string> recursive_;
  std::set<std::string> mirrors_;
};

std::vector<std::string> variables_of(const Rule& r);

}  // namespace premlog
