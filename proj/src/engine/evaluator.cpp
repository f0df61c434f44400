#include "premlog/evaluator.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "premlog/errors.hpp"

namespace premlog {

const std::vector<std::uint32_t>& RelationView::probe(std::uint64_t mask, const Tuple& key) const {
  static const std::vector<std::uint32_t> kNone;
  auto it = indexes_.find(mask);
  if (it == indexes_.end()) {
    Index idx;
    Tuple k;
    for (std::uint32_t i = 0; i < tuples_.size(); ++i) {
      k.clear();
      const Tuple& t = tuples_[i];
      for (std::size_t p = 0; p < t.size(); ++p)
        if (mask & (std::uint64_t{1} << p)) k.push_back(t[p]);
      idx[k].push_back(i);
    }
    it = indexes_.emplace(mask, std::move(idx)).first;
  }
  auto hit = it->second.find(key);
  return hit == it->second.end() ? kNone : hit->second;
}

namespace {

class Compiler {
 public:
  explicit Compiler(const Rule& r) { out_.source = r; }

  CompiledRule run() {
    const Rule& r = out_.source;
    for (const auto& a : r.arithmetic) pending_arith_.push_back(&a);
    for (const auto& c : r.comparisons) pending_cmp_.push_back(&c);
    if (r.guard) pending_guard_ = &*r.guard;

    for (const auto& atom : r.body) {
      out_.goals_after.push_back(schedule());
      out_.atoms.push_back(compile_atom(atom));
    }
    out_.goals_after.push_back(schedule());
    if (!pending_arith_.empty() || !pending_cmp_.empty() || pending_guard_)
      throw ValidationError("rule has goals whose variables are never bound");

    out_.head_predicate = r.head.predicate;
    for (const auto& t : r.head.args) {
      if (t.is_variable() && !bound(t.name()))
        throw ValidationError("head variable " + t.name() + " is never bound");
      out_.head.push_back(slot(t));
    }
    out_.var_count = vars_.size();
    return std::move(out_);
  }

 private:
  std::size_t var(const std::string& name) {
    auto [it, _] = vars_.emplace(name, vars_.size());
    return it->second;
  }
  bool bound(const std::string& name) const {
    auto it = vars_.find(name);
    return it != vars_.end() && bound_.count(it->second);
  }
  bool ready(const Term& t) const { return t.is_constant() || bound(t.name()); }
  Slot slot(const Term& t) {
    if (t.is_constant()) return Slot{true, t.value(), 0};
    return Slot{false, 0, var(t.name())};
  }

  std::vector<CompiledGoal> schedule() {
    std::vector<CompiledGoal> goals;
    bool progress = true;
    while (progress) {
      progress = false;
      for (auto it = pending_arith_.begin(); it != pending_arith_.end();) {
        const Arithmetic& a = **it;
        bool inputs = true;
        for (const auto& t : a.addends) inputs = inputs && ready(t);
        if (!inputs) {
          ++it;
          continue;
        }
        CompiledGoal g;
        g.kind = bound(a.target) ? CompiledGoal::Kind::CheckSum : CompiledGoal::Kind::Assign;
        g.target = var(a.target);
        for (const auto& t : a.addends) g.operands.push_back(slot(t));
        bound_.insert(g.target);
        goals.push_back(std::move(g));
        it = pending_arith_.erase(it);
        progress = true;
      }
    }
    for (auto it = pending_cmp_.begin(); it != pending_cmp_.end();) {
      const Comparison& c = **it;
      if (!ready(c.lhs) || !ready(c.rhs)) {
        ++it;
        continue;
      }
      CompiledGoal g;
      g.kind = CompiledGoal::Kind::Compare;
      g.op = c.op;
      g.operands = {slot(c.lhs), slot(c.rhs)};
      goals.push_back(std::move(g));
      it = pending_cmp_.erase(it);
    }
    if (pending_guard_) {
      bool inputs = true;
      for (const auto& t : pending_guard_->args) inputs = inputs && ready(t);
      if (inputs) {
        CompiledGoal g;
        g.kind = CompiledGoal::Kind::Guard;
        for (const auto& t : pending_guard_->args) g.operands.push_back(slot(t));
        g.worker = pending_guard_->worker;
        goals.push_back(std::move(g));
        pending_guard_ = nullptr;
      }
    }
    return goals;
  }

  CompiledAtom compile_atom(const Atom& atom) {
    if (atom.args.size() > 64) throw ValidationError("atoms wider than 64 arguments are not supported");
    CompiledAtom ca;
    ca.predicate = atom.predicate;
    std::vector<std::size_t> fresh;
    for (std::size_t p = 0; p < atom.args.size(); ++p) {
      const Term& t = atom.args[p];
      Slot s = slot(t);
      ca.args.push_back(s);
      if (t.is_constant() || bound_.count(s.var)) {
        ca.bound_mask |= std::uint64_t{1} << p;
        ca.bound_positions.push_back(p);
      } else if (std::find(fresh.begin(), fresh.end(), s.var) == fresh.end()) {
        fresh.push_back(s.var);
        ca.binds.emplace_back(p, s.var);
      } else {
        ca.repeats.emplace_back(p, s.var);
      }
    }
    bound_.insert(fresh.begin(), fresh.end());
    return ca;
  }

  CompiledRule out_;
  std::map<std::string, std::size_t> vars_;
  std::set<std::size_t> bound_;
  std::vector<const Arithmetic*> pending_arith_;
  std::vector<const Comparison*> pending_cmp_;
  const PartitionGuard* pending_guard_ = nullptr;
};

class Firing {
 public:
  Firing(const CompiledRule& rule, const std::vector<const RelationView*>& sources,
         const GuardHash* guard_hash, const Emit& emit)
      : rule_(rule), sources_(sources), guard_hash_(guard_hash), emit_(emit),
        env_(rule.var_count, 0) {}

  FireStats run() {
    match(0);
    return stats_;
  }

 private:
  Value get(const Slot& s) const { return s.is_constant ? s.value : env_[s.var]; }

  Value sum(const CompiledGoal& g) const {
    Value total = 0;
    for (const auto& s : g.operands)
      if (__builtin_add_overflow(total, get(s), &total))
        throw ArithmeticOverflow("integer overflow in rule for " + rule_.head_predicate);
    return total;
  }

  bool run_goals(std::size_t k) {
    for (const auto& g : rule_.goals_after[k]) {
      switch (g.kind) {
        case CompiledGoal::Kind::Assign:
          env_[g.target] = sum(g);
          break;
        case CompiledGoal::Kind::CheckSum:
          if (env_[g.target] != sum(g)) return false;
          break;
        case CompiledGoal::Kind::Compare: {
          Value a = get(g.operands[0]), b = get(g.operands[1]);
          bool ok = g.op == CompareOp::Lt ? a < b : g.op == CompareOp::Le ? a <= b : a == b;
          if (!ok) return false;
          break;
        }
        case CompiledGoal::Kind::Guard: {
          if (!guard_hash_) throw ValidationError("partition guard evaluated without a hash");
          if (!g.worker) throw ValidationError("partition guard has no worker id");
          key_.clear();
          for (const auto& s : g.operands) key_.push_back(get(s));
          if (bucket_of(key_, guard_hash_->seed, guard_hash_->worker_count) != *g.worker)
            return false;
          break;
        }
      }
    }
    return true;
  }

  void match(std::size_t k) {
    if (!run_goals(k)) return;
    if (k == rule_.atoms.size()) {
      Tuple head;
      head.reserve(rule_.head.size());
      for (const auto& s : rule_.head) head.push_back(get(s));
      ++stats_.derivations;
      emit_(head);
      return;
    }
    const CompiledAtom& atom = rule_.atoms[k];
    const RelationView& view = *sources_[k];
    auto visit = [&](const Tuple& t) {
      ++stats_.probes;
      if (t.size() != atom.args.size()) return;
      for (auto [p, v] : atom.binds) env_[v] = t[p];
      for (auto [p, v] : atom.repeats)
        if (t[p] != env_[v]) return;
      match(k + 1);
    };
    if (atom.bound_mask == 0) {
      for (const auto& t : view.tuples()) visit(t);
      return;
    }
    Tuple key;
    key.reserve(atom.bound_positions.size());
    for (auto p : atom.bound_positions) key.push_back(get(atom.args[p]));
    // Index nodes are stable, so the hit list survives nested probes that
    // build indexes for other masks on the same view.
    for (auto i : view.probe(atom.bound_mask, key)) visit(view.tuples()[i]);
  }

  const CompiledRule& rule_;
  const std::vector<const RelationView*>& sources_;
  const GuardHash* guard_hash_;
  const Emit& emit_;
  std::vector<Value> env_;
  Tuple key_;
  FireStats stats_;
};

}  // namespace

CompiledRule compile_rule(const Rule& r) { return Compiler(r).run(); }

FireStats fire_rule(const CompiledRule& rule, const std::vector<const RelationView*>& sources,
                    const GuardHash* guard_hash, const Emit& emit) {
  if (sources.size() != rule.atoms.size())
    throw InvariantViolation("fire_rule: one source per body atom required");
  return Firing(rule, sources, guard_hash, emit).run();
}

}  // namespace premlog
