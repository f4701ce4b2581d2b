#include "masv/logic/evaluate.hpp"

#include <algorithm>

namespace masv::logic {

std::vector<std::vector<bool>> domain_tables(const spec::ValidatedSpec& spec) {
  std::vector<std::vector<bool>> out;
  out.reserve(spec.domains.size());
  for (const auto& d : spec.domains) out.push_back(d.contains);
  return out;
}

namespace {

bool derive(const Joiner& joiner, const CompiledRule& rule, std::span<const Interpretation* const> sources,
            const Interpretation& total, int first, const AtomIndex& index, Interpretation& model,
            Interpretation* delta) {
  bool grew = false;
  std::vector<AtomId> heads;
  Binding binding(rule.body.variables.size(), kUnbound);
  joiner.run(rule.body, sources, total, total, binding, first, [&](const Binding& b) {
    heads.push_back(ground(rule.head, b, index));
    return true;
  });
  for (AtomId h : heads) {
    if (model.add(h)) {
      grew = true;
      if (delta) delta->insert(h);
    }
  }
  return grew;
}

}  // namespace

Interpretation minimal_model(const Interpretation& facts, const LogicProgram& program,
                             const AtomIndex& index, const std::vector<std::vector<bool>>& domains) {
  Interpretation model = facts;
  const Joiner joiner(index, domains);
  std::vector<const Interpretation*> sources;

  for (int s = 0; s < program.strata; ++s) {
    std::vector<const CompiledRule*> rules;
    for (const auto& r : program.rules)
      if (r.stratum == s) rules.push_back(&r);
    if (rules.empty()) continue;

    // First round: every rule against the current model.
    Interpretation delta = index.empty_interpretation();
    for (const CompiledRule* r : rules) {
      sources.assign(r->body.literals.size(), nullptr);
      derive(joiner, *r, sources, model, -1, index, model, &delta);
    }

    // Later rounds: at least one same-stratum body literal must use a
    // fact that was new in the previous round.
    while (!delta.empty()) {
      Interpretation next = index.empty_interpretation();
      for (const CompiledRule* r : rules) {
        for (std::size_t i = 0; i < r->body.literals.size(); ++i) {
          const auto& lit = r->body.literals[i];
          if (lit.negated || program.predicate_strata[lit.atom.predicate] != s) continue;
          sources.assign(r->body.literals.size(), nullptr);
          sources[i] = &delta;
          derive(joiner, *r, sources, model, static_cast<int>(i), index, model, &next);
        }
      }
      delta = std::move(next);
    }
  }
  return model;
}

std::vector<Substitution> query(const Interpretation& interp, const Conjunction& conj,
                                const AtomIndex& index, const std::vector<std::vector<bool>>& domains) {
  std::vector<bool> bound(conj.variables.size(), false);
  for (const auto& l : conj.literals)
    if (!l.negated)
      for (const auto& t : l.atom.args)
        if (t.variable) bound[t.value] = true;
  for (const auto& l : conj.literals)
    if (l.negated)
      for (const auto& t : l.atom.args)
        if (t.variable && !bound[t.value])
          throw UnboundNegationError("variable " + conj.variables[t.value] +
                                     " occurs only in a negated literal");

  std::vector<Binding> found;
  Binding binding(conj.variables.size(), kUnbound);
  std::vector<const Interpretation*> sources(conj.literals.size(), nullptr);
  Joiner(index, domains).run(conj, sources, interp, interp, binding, -1, [&](const Binding& b) {
    found.push_back(b);
    return true;
  });
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());

  std::vector<Substitution> out;
  out.reserve(found.size());
  for (const auto& b : found) {
    Substitution s;
    for (std::size_t i = 0; i < b.size(); ++i) s.bindings.emplace_back(conj.variables[i], b[i]);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace masv::logic
