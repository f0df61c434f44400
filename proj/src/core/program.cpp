#include <algorithm>
#include <functional>

#include "premlog/ast.hpp"
#include "premlog/errors.hpp"
#include "premlog/parser.hpp"

namespace premlog {

Term Term::variable(std::string name) { return Term(std::move(name)); }
Term Term::constant(Value v) { return Term(v); }

const char* to_string(AggregateKind k) { return k == AggregateKind::Min ? "min" : "max"; }

std::vector<std::string> variables_of(const Rule& r) {
  std::vector<std::string> out;
  auto add = [&](const Term& t) {
    if (t.is_variable() && std::find(out.begin(), out.end(), t.name()) == out.end())
      out.push_back(t.name());
  };
  for (const auto& a : r.body)
    for (const auto& t : a.args) add(t);
  for (const auto& a : r.arithmetic) {
    add(Term::variable(a.target));
    for (const auto& t : a.addends) add(t);
  }
  for (const auto& c : r.comparisons) {
    add(c.lhs);
    add(c.rhs);
  }
  if (r.guard)
    for (const auto& t : r.guard->args) add(t);
  for (const auto& t : r.head.args) add(t);
  return out;
}

namespace {

void check_safety(const Rule& r) {
  std::set<std::string> bound;
  for (const auto& a : r.body)
    for (const auto& t : a.args)
      if (t.is_variable()) bound.insert(t.name());

  auto all_bound = [&](const std::vector<Term>& ts) {
    return std::all_of(ts.begin(), ts.end(),
                       [&](const Term& t) { return t.is_constant() || bound.count(t.name()); });
  };

  bool progress = true;
  while (progress) {
    progress = false;
    for (const auto& a : r.arithmetic) {
      if (!bound.count(a.target) && all_bound(a.addends)) {
        bound.insert(a.target);
        progress = true;
      }
    }
  }

  auto fail = [&](const std::string& var, const char* where) {
    throw ValidationError("unsafe rule `" + print_rule(r) + "`: variable " + var + " in " +
                          where + " is not bound by a positive body atom");
  };
  for (const auto& t : r.head.args)
    if (t.is_variable() && !bound.count(t.name())) fail(t.name(), "the head");
  for (const auto& a : r.arithmetic) {
    for (const auto& t : a.addends)
      if (t.is_variable() && !bound.count(t.name())) fail(t.name(), "an arithmetic goal");
  }
  for (const auto& c : r.comparisons) {
    for (const Term* t : {&c.lhs, &c.rhs})
      if (t->is_variable() && !bound.count(t->name())) fail(t->name(), "a comparison");
  }
  if (r.guard) {
    for (const auto& t : r.guard->args)
      if (t.is_variable() && !bound.count(t.name())) fail(t.name(), "a partition guard");
  }
}

}  // namespace

Program Program::build(std::vector<Rule> rules, std::set<std::string> prem_pushed,
                       SymbolTable symbols) {
  Program p;
  p.rules_ = std::move(rules);
  p.prem_pushed_ = std::move(prem_pushed);
  p.symbols_ = std::move(symbols);
  p.analyze();
  return p;
}

void Program::analyze() {
  // Predicate order of first appearance keeps strata output deterministic.
  std::vector<std::string> order;
  auto note = [&](const Atom& a) {
    auto [it, inserted] = arity_.emplace(a.predicate, a.args.size());
    if (inserted) {
      order.push_back(a.predicate);
    } else if (it->second != a.args.size()) {
      throw ValidationError("arity conflict for predicate " + a.predicate + ": used with " +
                            std::to_string(it->second) + " and " +
                            std::to_string(a.args.size()) + " arguments");
    }
  };
  for (const auto& r : rules_) {
    note(r.head);
    for (const auto& a : r.body) note(a);
  }
  for (const auto& r : rules_) idb_.insert(r.head.predicate);
  for (const auto& [name, _] : arity_)
    if (!idb_.count(name)) edb_.insert(name);

  for (const auto& r : rules_) {
    if (r.head_aggregate) {
      const auto& agg = *r.head_aggregate;
      if (agg.cost_position >= r.head.args.size() || !r.head.args[agg.cost_position].is_variable())
        throw ValidationError("aggregate cost argument of `" + print_rule(r) +
                              "` must be a variable");
    }
    check_safety(r);
  }
  for (const auto& pred : idb_) {
    std::optional<std::optional<AggregateHead>> seen;
    for (const Rule* r : rules_for(pred)) {
      if (!seen) {
        seen = r->head_aggregate;
      } else if (*seen != r->head_aggregate) {
        throw ValidationError("conflicting aggregate annotations for predicate " + pred);
      }
    }
  }
  for (const auto& pred : prem_pushed_) {
    if (!idb_.count(pred))
      throw ValidationError(".prem names unknown derived predicate " + pred);
  }

  // Tarjan over the IDB dependency graph (body -> head).
  std::map<std::string, std::vector<std::string>> succ;
  std::set<std::pair<std::string, std::string>> edges;
  for (const auto& r : rules_)
    for (const auto& a : r.body)
      if (idb_.count(a.predicate) && edges.emplace(a.predicate, r.head.predicate).second)
        succ[a.predicate].push_back(r.head.predicate);

  std::vector<std::string> nodes;
  for (const auto& name : order)
    if (idb_.count(name)) nodes.push_back(name);

  std::map<std::string, int> index, low;
  std::set<std::string> on_stack;
  std::vector<std::string> stack;
  std::vector<std::vector<std::string>> sccs;
  int counter = 0;
  std::function<void(const std::string&)> connect = [&](const std::string& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    for (const auto& w : succ[v]) {
      if (!index.count(w)) {
        connect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack.count(w)) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::string> comp;
      std::string w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack.erase(w);
        comp.push_back(w);
      } while (w != v);
      sccs.push_back(std::move(comp));
    }
  };
  for (const auto& v : nodes)
    if (!index.count(v)) connect(v);

  // Kahn over the condensation, breaking ties by first appearance.
  std::map<std::string, std::size_t> comp_of;
  for (std::size_t c = 0; c < sccs.size(); ++c)
    for (const auto& v : sccs[c]) comp_of[v] = c;
  auto first_pos = [&](std::size_t c) {
    std::size_t best = nodes.size();
    for (const auto& v : sccs[c]) {
      auto pos = static_cast<std::size_t>(std::find(nodes.begin(), nodes.end(), v) - nodes.begin());
      best = std::min(best, pos);
    }
    return best;
  };
  std::vector<std::set<std::size_t>> comp_succ(sccs.size());
  std::vector<std::size_t> indegree(sccs.size(), 0);
  for (const auto& [from, to] : edges) {
    auto a = comp_of[from], b = comp_of[to];
    if (a != b && comp_succ[a].insert(b).second) ++indegree[b];
  }
  std::vector<std::size_t> ready;
  for (std::size_t c = 0; c < sccs.size(); ++c)
    if (indegree[c] == 0) ready.push_back(c);
  while (!ready.empty()) {
    auto it = std::min_element(ready.begin(), ready.end(),
                               [&](auto a, auto b) { return first_pos(a) < first_pos(b); });
    std::size_t c = *it;
    ready.erase(it);
    std::vector<std::string> stratum = sccs[c];
    std::sort(stratum.begin(), stratum.end(), [&](const auto& a, const auto& b) {
      return std::find(nodes.begin(), nodes.end(), a) < std::find(nodes.begin(), nodes.end(), b);
    });
    for (const auto& v : stratum) stratum_index_[v] = strata_.size();
    strata_.push_back(std::move(stratum));
    for (auto d : comp_succ[c])
      if (--indegree[d] == 0) ready.push_back(d);
  }

  for (const auto& comp : strata_) {
    bool cyclic = comp.size() > 1;
    if (!cyclic) {
      const auto& v = comp.front();
      cyclic = edges.count({v, v}) > 0;
    }
    if (cyclic) recursive_.insert(comp.begin(), comp.end());
  }

  for (const auto& pred : idb_) {
    if (!recursive_.count(pred)) continue;
    auto defining = rules_for(pred);
    bool mirror = !defining.empty();
    for (const Rule* r : defining) {
      const std::string& src = r->body.empty() ? pred : r->body.front().predicate;
      if (!is_copy_rule(*r) || !idb_.count(src) || stratum_of(src) != stratum_of(pred)) {
        mirror = false;
        break;
      }
    }
    if (mirror) mirrors_.insert(pred);
  }
}

std::size_t Program::arity(const std::string& predicate) const {
  auto it = arity_.find(predicate);
  if (it == arity_.end()) throw ValidationError("unknown predicate " + predicate);
  return it->second;
}

bool Program::has_predicate(const std::string& predicate) const {
  return arity_.count(predicate) > 0;
}

std::size_t Program::stratum_of(const std::string& predicate) const {
  auto it = stratum_index_.find(predicate);
  if (it == stratum_index_.end())
    throw ValidationError(predicate + " is not a derived predicate");
  return it->second;
}

bool Program::is_recursive(const std::string& predicate) const {
  return recursive_.count(predicate) > 0;
}

std::vector<const Rule*> Program::rules_for(const std::string& predicate) const {
  std::vector<const Rule*> out;
  for (const auto& r : rules_)
    if (r.head.predicate == predicate) out.push_back(&r);
  return out;
}

std::optional<AggregateHead> Program::aggregate_of(const std::string& predicate) const {
  for (const auto& r : rules_)
    if (r.head.predicate == predicate) return r.head_aggregate;
  return std::nullopt;
}

bool Program::is_copy_rule(const Rule& r) const {
  if (r.body.size() != 1 || !r.arithmetic.empty() || !r.comparisons.empty()) return false;
  const Atom& src = r.body.front();
  if (src.predicate == r.head.predicate || src.args != r.head.args) return false;
  std::set<std::string> seen;
  for (const auto& t : src.args)
    if (!t.is_variable() || !seen.insert(t.name()).second) return false;
  return true;
}

}  // namespace premlog
