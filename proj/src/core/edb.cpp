#include "premlog/edb.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "premlog/errors.hpp"

namespace premlog {

void RelationStore::declare(const std::string& predicate, std::size_t arity) {
  auto [it, inserted] = relations_.try_emplace(predicate);
  if (inserted) {
    it->second.arity = arity;
  } else if (it->second.arity != arity) {
    throw ValidationError("arity conflict for base relation " + predicate);
  }
}

bool RelationStore::insert(const std::string& predicate, Tuple t) {
  declare(predicate, t.size());
  return relations_[predicate].tuples.insert(std::move(t)).second;
}

void RelationStore::merge(const RelationStore& other) {
  for (const auto& [name, entry] : other.relations_) {
    declare(name, entry.arity);
    relations_[name].tuples.insert(entry.tuples.begin(), entry.tuples.end());
  }
}

std::size_t RelationStore::arity(const std::string& predicate) const {
  auto it = relations_.find(predicate);
  if (it == relations_.end()) throw ValidationError("unknown base relation " + predicate);
  return it->second.arity;
}

const std::set<Tuple>& RelationStore::tuples(const std::string& predicate) const {
  static const std::set<Tuple> kEmpty;
  auto it = relations_.find(predicate);
  return it == relations_.end() ? kEmpty : it->second.tuples;
}

std::vector<std::string> RelationStore::predicates() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : relations_) out.push_back(name);
  return out;
}

std::size_t RelationStore::size() const {
  std::size_t n = 0;
  for (const auto& [_, entry] : relations_) n += entry.tuples.size();
  return n;
}

namespace {

bool integer_shaped(std::string_view s) {
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

}  // namespace

RelationStore parse_edb(std::string_view text, const std::string& predicate, std::size_t arity,
                        const LoadOptions& opts) {
  if (opts.undirected && arity < 2)
    throw ValidationError("undirected loading needs at least two columns");
  RelationStore store;
  store.declare(predicate, arity);

  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream fields(line);
    std::string field;
    Tuple t;
    bool comment = false;
    while (fields >> field) {
      if (t.empty() && field[0] == '#') {
        comment = true;
        break;
      }
      if (integer_shaped(field)) {
        std::string_view digits = field;
        if (digits[0] == '+') digits.remove_prefix(1);
        Value v = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
        if (ec == std::errc::result_out_of_range)
          throw LoadError(lineno, "integer overflow in field '" + field + "'");
        if (ec != std::errc() || ptr != digits.data() + digits.size())
          throw LoadError(lineno, "malformed integer '" + field + "'");
        t.push_back(v);
      } else if (opts.symbols) {
        t.push_back(opts.symbols->intern(field));
      } else {
        throw LoadError(lineno, "malformed field '" + field + "' (expected an integer)");
      }
    }
    if (comment || t.empty()) continue;
    if (t.size() != arity)
      throw LoadError(lineno, "arity mismatch: expected " + std::to_string(arity) +
                                  " fields, found " + std::to_string(t.size()));
    if (opts.undirected) {
      Tuple rev = t;
      std::swap(rev[0], rev[1]);
      store.insert(predicate, std::move(rev));
    }
    store.insert(predicate, std::move(t));
  }
  return store;
}

RelationStore load_edb(const std::filesystem::path& path, const std::string& predicate,
                       std::size_t arity, const LoadOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(0, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_edb(buf.str(), predicate, arity, opts);
}

}  // namespace premlog
