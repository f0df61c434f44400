#include "premlog/validate.hpp"

#include <algorithm>

#include "premlog/errors.hpp"

namespace premlog {

const Clique* ValidationReport::clique_of(const std::string& predicate) const {
  for (const auto& c : cliques)
    if (std::find(c.predicates.begin(), c.predicates.end(), predicate) != c.predicates.end())
      return &c;
  return nullptr;
}

ValidationReport validate_program(const Program& p) {
  ValidationReport report;
  report.strata = p.strata();

  for (const auto& stratum : p.strata()) {
    if (!p.is_recursive(stratum.front())) continue;
    Clique clique;
    clique.predicates = stratum;
    for (const auto& pred : stratum)
      if (p.mirror_predicates().count(pred)) clique.mirror_predicates.push_back(pred);

    for (const auto& pred : stratum) {
      for (const Rule* r : p.rules_for(pred)) {
        std::size_t in_clique = 0;
        for (const auto& a : r->body) {
          bool member = std::find(stratum.begin(), stratum.end(), a.predicate) != stratum.end();
          if (member && !p.mirror_predicates().count(a.predicate)) ++in_clique;
        }
        if (in_clique > 1) clique.linearity = Linearity::NonLinear;
      }
    }
    report.cliques.push_back(std::move(clique));
  }

  for (const auto& pred : p.idb_predicates()) {
    bool aggregated = p.aggregate_of(pred).has_value();
    bool pushed = p.prem_pushed().count(pred) > 0;
    bool recursive = p.is_recursive(pred);
    if (aggregated && recursive && !pushed)
      throw ValidationError("aggregate on " + pred +
                            " is used inside recursion without a `.prem " + pred +
                            ".` marker; its meaning is undefined");
    if (pushed && !recursive)
      throw ValidationError(".prem " + pred + " names a non-recursive predicate");
    if (pushed && !aggregated)
      throw ValidationError(".prem " + pred + " names a predicate without an aggregate head");
  }
  return report;
}

}  // namespace premlog
