#include "masv/logic/program.hpp"

#include <algorithm>

namespace masv::logic {

PatternAtom compile_atom(const spec::Atom& atom, const spec::ScopeTyping& scope,
                         const spec::ValidatedSpec& spec) {
  PatternAtom out;
  out.predicate = *spec.predicate_id(atom.predicate);
  for (const auto& t : atom.args) {
    if (t.is_variable()) {
      out.args.push_back(TermRef::slot(static_cast<std::uint32_t>(*scope.slot(t.name))));
    } else {
      out.args.push_back(TermRef::constant(*spec.constant_id(t.name)));
    }
  }
  return out;
}

LogicProgram compile_program(const spec::ValidatedSpec& spec) {
  LogicProgram prog;
  for (const auto& p : spec.predicates) prog.predicate_strata.push_back(p.stratum);
  prog.strata = std::max(1, spec.strata.count());
  for (std::size_t i = 0; i < spec.ast.knowledge.size(); ++i) {
    const auto& rule = spec.ast.knowledge[i];
    const auto& scope = spec.knowledge_scopes[i];
    CompiledRule cr;
    cr.head = compile_atom(rule.head, scope, spec);
    cr.body.variables = scope.variables;
    cr.body.domains = scope.domains;
    for (const auto& l : rule.body) cr.body.literals.push_back({l.negated, compile_atom(l.atom, scope, spec)});
    cr.stratum = prog.predicate_strata[cr.head.predicate];
    prog.rules.push_back(std::move(cr));
  }
  return prog;
}

Conjunction make_conjunction(const std::vector<spec::Literal>& literals, const spec::ValidatedSpec& spec) {
  Conjunction c;
  for (const auto& l : literals) {
    auto pid = spec.predicate_id(l.atom.predicate);
    if (!pid) throw std::invalid_argument("unknown predicate '" + l.atom.predicate + "'");
    const auto& pinfo = spec.predicates[*pid];
    if (pinfo.arg_domains.size() != l.atom.args.size())
      throw std::invalid_argument("arity mismatch for '" + l.atom.predicate + "'");
    PatternAtom pa;
    pa.predicate = *pid;
    for (std::size_t i = 0; i < l.atom.args.size(); ++i) {
      const auto& t = l.atom.args[i];
      if (t.is_variable()) {
        auto it = std::find(c.variables.begin(), c.variables.end(), t.name);
        if (it == c.variables.end()) {
          c.variables.push_back(t.name);
          c.domains.push_back(pinfo.arg_domains[i]);
          it = c.variables.end() - 1;
        }
        pa.args.push_back(TermRef::slot(static_cast<std::uint32_t>(it - c.variables.begin())));
      } else {
        auto cid = spec.constant_id(t.name);
        if (!cid) throw std::invalid_argument("unknown constant '" + t.name + "'");
        pa.args.push_back(TermRef::constant(*cid));
      }
    }
    c.literals.push_back({l.negated, std::move(pa)});
  }
  return c;
}

AtomId ground(const PatternAtom& atom, const Binding& binding, const AtomIndex& index) {
  ConstId args[16];
  for (std::size_t i = 0; i < atom.args.size(); ++i)
    args[i] = atom.args[i].variable ? binding[atom.args[i].value] : atom.args[i].value;
  auto id = index.find(atom.predicate, std::span<const ConstId>(args, atom.args.size()));
  if (!id) throw std::logic_error("grounding outside the Herbrand base for predicate '" +
                                  index.predicate_name(atom.predicate) + "'");
  return *id;
}

}  // namespace masv::logic
