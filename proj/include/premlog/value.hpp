#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace premlog {

/// Every runtime constant is a 64-bit signed integer; strings are interned.
using Value = std::int64_t;
using Tuple = std::vector<Value>;

/// Interned string ids live above this base so they never collide with the
/// small integers used as node ids and costs.
inline constexpr Value kSymbolBase = Value{1} << 62;

struct TupleHash {
  std::size_t operator()(const Tuple& t) const noexcept;
};

class SymbolTable {
 public:
  Value intern(std::string_view name);
  std::optional<Value> find(std::string_view name) const;
  /// Name of an interned value, or nullopt for plain integers.
  std::optional<std::string_view> name_of(Value v) const;
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Value> ids_;
};

std::string format_tuple(std::span<const Value> t, char sep = ',');

}  // namespace premlog
