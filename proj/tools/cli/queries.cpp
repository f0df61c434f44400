#include "queries.hpp"

#include <charconv>

#include "premlog/errors.hpp"
#include "premlog/parser.hpp"
#include "premlog/prem.hpp"
#include "premlog/validate.hpp"

namespace premlog::cli {

namespace {

constexpr std::string_view kApspLinear =
    "path(X, Y, D) <- arc(X, Y, D).\n"
    "path(X, Y, D) <- path(X, Z, Dxz), arc(Z, Y, Dzy), D = Dxz + Dzy.\n"
    "shortestpath(X, Y, min<D>) <- path(X, Y, D).\n";

constexpr std::string_view kApspNonlinear =
    "path(X, Y, D) <- arc(X, Y, D).\n"
    "path(X, Y, D) <- path(X, Z, Dxz), path(Z, Y, Dzy), D = Dxz + Dzy.\n"
    "shortestpath(X, Y, min<D>) <- path(X, Y, D).\n";

constexpr std::string_view kTc =
    "tc(X, Y) <- arc(X, Y).\n"
    "tc(X, Y) <- tc(X, Z), tc(Z, Y).\n";

std::optional<Constraint> recursive_constraint(const Program& p) {
  std::optional<Constraint> found;
  for (const auto& pred : p.idb_predicates()) {
    auto agg = p.aggregate_of(pred);
    if (!agg || !p.is_recursive(pred) || p.mirror_predicates().count(pred)) continue;
    if (found) throw ValidationError("more than one recursive aggregate; pick one with --partition-on");
    found = Constraint::from_aggregate(pred, *agg);
  }
  return found;
}

Workload finish(std::string name, Program p, bool push_prem, std::string result) {
  if (push_prem) {
    std::optional<Constraint> upper;
    for (const auto& pred : p.idb_predicates()) {
      auto agg = p.aggregate_of(pred);
      if (agg && !p.is_recursive(pred)) {
        if (upper) throw ValidationError("--push-prem needs exactly one stratified min/max");
        upper = Constraint::from_aggregate(pred, *agg);
      }
    }
    if (!upper) throw ValidationError("--push-prem: the program has no stratified min/max");
    p = push_constraint(p, *upper);
  }
  if (p.edb_predicates().size() != 1)
    throw ValidationError("the program must read exactly one base relation");
  if (result.empty()) result = p.strata().back().front();
  if (!p.idb_predicates().count(result)) throw ValidationError("unknown result predicate " + result);
  Workload w;
  w.name = std::move(name);
  w.edb_predicate = *p.edb_predicates().begin();
  w.result_predicate = std::move(result);
  w.gamma = recursive_constraint(p);
  w.program = std::move(p);
  return w;
}

}  // namespace

Workload builtin_query(std::string_view name, bool push_prem) {
  if (name == "apsp-linear")
    return finish("apsp-linear", parse_program(kApspLinear), push_prem, "shortestpath");
  if (name == "apsp-nonlinear")
    return finish("apsp-nonlinear", parse_program(kApspNonlinear), push_prem, "shortestpath");
  if (name == "tc") {
    if (push_prem) throw ValidationError("--push-prem: tc has no min/max to push");
    return finish("tc", rewrite_decomposable_nonlinear(parse_program(kTc)), false, "tc");
  }
  throw ValidationError("unknown query '" + std::string(name) + "' (apsp-linear, apsp-nonlinear, tc)");
}

Workload workload_from_text(std::string_view text, bool push_prem, const std::string& result) {
  Program p = parse_program(text);
  validate_program(p);
  return finish("program", std::move(p), push_prem, result);
}

DiscriminatingSet parse_partition_spec(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size())
    throw ValidationError("--partition-on expects pred:pos[,pos...], got '" + std::string(text) + "'");
  DiscriminatingSet s;
  s.predicate = std::string(text.substr(0, colon));
  std::string_view rest = text.substr(colon + 1);
  while (!rest.empty()) {
    auto comma = rest.find(',');
    std::string_view field = rest.substr(0, comma);
    std::size_t pos = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), pos);
    if (ec != std::errc() || ptr != field.data() + field.size())
      throw ValidationError("bad position '" + std::string(field) + "' in --partition-on");
    s.positions.push_back(pos);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return s;
}

PartitionFn default_partition(const Workload& w, std::size_t workers, std::uint64_t seed,
                              const std::vector<DiscriminatingSet>& extra) {
  PartitionFn f;
  f.worker_count = workers;
  f.seed = seed;
  if (extra.empty()) {
    f.discriminating = {w.gamma ? w.gamma->predicate : w.result_predicate, {0}};
  } else {
    f.discriminating = extra.front();
    for (std::size_t k = 1; k < extra.size(); ++k) f.overrides[extra[k].predicate] = extra[k].positions;
  }
  const auto& arities = w.program.arities();
  for (const auto& s : extra) {
    auto it = arities.find(s.predicate);
    if (it == arities.end()) throw ValidationError("--partition-on: unknown predicate " + s.predicate);
    s.check(it->second);
  }
  return f;
}

Program plan_program(const Workload& w) {
  for (const auto& c : validate_program(w.program).cliques)
    if (c.linearity == Linearity::NonLinear) return rewrite_decomposable_nonlinear(w.program);
  return w.program;
}

std::vector<PlanShard> make_plan(const Workload& w, const PartitionFn& f, const RelationStore& edb) {
  return rewrite_lockfree(plan_program(w), f, edb);
}

}  // namespace premlog::cli
