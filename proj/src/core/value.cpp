#include "premlog/value.hpp"

#include "premlog/hashing.hpp"

namespace premlog {

std::size_t TupleHash::operator()(const Tuple& t) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ t.size();
  for (Value v : t) h = mix64(h ^ static_cast<std::uint64_t>(v));
  return static_cast<std::size_t>(h);
}

Value SymbolTable::intern(std::string_view name) {
  if (auto it = ids_.find(std::string(name)); it != ids_.end()) return it->second;
  Value id = kSymbolBase + static_cast<Value>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(std::string(name), id);
  return id;
}

std::optional<Value> SymbolTable::find(std::string_view name) const {
  if (auto it = ids_.find(std::string(name)); it != ids_.end()) return it->second;
  return std::nullopt;
}

std::optional<std::string_view> SymbolTable::name_of(Value v) const {
  if (v < kSymbolBase) return std::nullopt;
  auto idx = static_cast<std::size_t>(v - kSymbolBase);
  if (idx >= names_.size()) return std::nullopt;
  return names_[idx];
}

std::string format_tuple(std::span<const Value> t, char sep) {
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out.push_back(sep);
    out += std::to_string(t[i]);
  }
  return out;
}

}  // namespace premlog
