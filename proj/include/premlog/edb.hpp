#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "premlog/value.hpp"

namespace premlog {

/// Base relations: per-predicate duplicate-free tuple sets of fixed arity.
/// Ordered storage keeps iteration (and therefore sharding and output)
/// independent of insertion order.
class RelationStore {
 public:
  void declare(const std::string& predicate, std::size_t arity);
  /// Returns false when the tuple was already present.
  bool insert(const std::string& predicate, Tuple t);
  void merge(const RelationStore& other);

  bool contains(const std::string& predicate) const { return relations_.count(predicate) > 0; }
  std::size_t arity(const std::string& predicate) const;
  const std::set<Tuple>& tuples(const std::string& predicate) const;
  std::vector<std::string> predicates() const;
  std::size_t size() const;

  bool operator==(const RelationStore&) const = default;

 private:
  struct Entry {
    std::size_t arity = 0;
    std::set<Tuple> tuples;
    bool operator==(const Entry&) const = default;
  };
  std::map<std::string, Entry> relations_;
};

struct LoadOptions {
  /// Insert (v, u, rest...) next to every (u, v, rest...).
  bool undirected = false;
  /// When set, non-integer fields are interned; otherwise they are errors.
  SymbolTable* symbols = nullptr;
};

/// Whitespace-separated fields, one tuple per line, `#` comment lines.
RelationStore parse_edb(std::string_view text, const std::string& predicate, std::size_t arity,
                        const LoadOptions& opts = {});
RelationStore load_edb(const std::filesystem::path& path, const std::string& predicate,
                       std::size_t arity, const LoadOptions& opts = {});

}  // namespace premlog
