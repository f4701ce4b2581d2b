#include "masv/agent/system.hpp"

#include <algorithm>

namespace masv::agent {

AgentSystem::AgentSystem(spec::ValidatedSpec spec, std::size_t atom_limit)
    : spec_(std::move(spec)),
      index_(logic::AtomIndex::build(spec_, atom_limit)),
      program_(logic::compile_program(spec_)),
      domains_(logic::domain_tables(spec_)) {
  const auto& ast = spec_.ast;

  for (std::size_t i = 0; i < ast.actions.size(); ++i) {
    const auto& a = ast.actions[i];
    const auto& scope = spec_.action_scopes[i];
    CompiledAction ca;
    ca.name = a.name;
    ca.arity = a.params.size();
    ca.param_domains = spec_.action_param_domains[i];
    ca.duration = a.duration;
    ca.precondition = compile_condition(a.precondition, scope);
    for (const auto& o : a.outcomes) {
      CompiledOutcome co;
      co.weight = o.weight;
      for (const auto& e : o.effects) co.effects.emplace_back(e.insert, logic::compile_atom(e.atom, scope, spec_));
      ca.outcomes.push_back(std::move(co));
    }
    actions_.push_back(std::move(ca));
  }

  for (std::size_t i = 0; i < ast.decision_rules.size(); ++i) {
    const auto& r = ast.decision_rules[i];
    const auto& scope = spec_.rule_scopes[i];
    CompiledDecisionRule cr;
    cr.condition = compile_condition(r.condition, scope);
    cr.action = *spec_.action_index(r.action);
    for (const auto& t : r.args) {
      cr.args.push_back(t.is_variable()
                            ? logic::TermRef::slot(static_cast<std::uint32_t>(*scope.slot(t.name)))
                            : logic::TermRef::constant(*spec_.constant_id(t.name)));
    }
    rules_.push_back(std::move(cr));
  }

  for (std::size_t i = 0; i < ast.send_rules.size(); ++i) {
    const auto& s = ast.send_rules[i];
    const auto& scope = spec_.send_scopes[i];
    CompiledSendRule cs;
    cs.condition = compile_condition(s.condition, scope);
    cs.message = logic::compile_atom(s.message, scope, spec_);
    if (s.recipient) cs.recipient = spec_.agent_index(*s.recipient);
    sends_.push_back(std::move(cs));
  }

  for (std::size_t i = 0; i < ast.receive_rules.size(); ++i) {
    const auto& r = ast.receive_rules[i];
    const auto& scope = spec_.receive_scopes[i];
    CompiledReceiveRule cr;
    cr.pattern.variables = scope.variables;
    cr.pattern.domains = scope.domains;
    cr.pattern.literals.push_back({false, logic::compile_atom(r.message, scope, spec_)});
    if (r.sender) cr.sender = spec_.agent_index(*r.sender);
    cr.insert = r.insert;
    cr.atom = logic::compile_atom(r.atom, scope, spec_);
    receives_.push_back(std::move(cr));
  }

  for (std::size_t ci = 0; ci < ast.safety.size(); ++ci) {
    const auto& c = ast.safety[ci];
    const auto& scope = spec_.safety_scopes[ci];
    std::vector<std::pair<bool, PatternAtom>> lits;
    for (const auto& l : c.literals) lits.emplace_back(l.negated, logic::compile_atom(l.atom, scope, spec_));
    Binding binding(scope.variables.size(), logic::kUnbound);
    std::vector<std::size_t> pos(scope.variables.size(), 0);
    auto emit = [&] {
      SafetyGrounding g;
      g.constraint = ci;
      for (std::size_t v = 0; v < pos.size(); ++v) {
        binding[v] = spec_.domains[scope.domains[v]].members[pos[v]];
        g.binding.emplace_back(scope.variables[v], binding[v]);
      }
      for (const auto& [neg, pat] : lits) g.literals.push_back({neg, logic::ground(pat, binding, index_)});
      safety_.push_back(std::move(g));
    };
    // odometer over the variables' domains, first variable most significant
    for (;;) {
      emit();
      std::size_t v = pos.size();
      while (v > 0 && ++pos[v - 1] == spec_.domains[scope.domains[v - 1]].members.size()) {
        pos[v - 1] = 0;
        --v;
      }
      if (v == 0) break;
    }
  }
}

CompiledCondition AgentSystem::compile_condition(const spec::MentalCondition& c,
                                                 const spec::ScopeTyping& scope) const {
  CompiledCondition out;
  out.variables = scope.variables;
  out.domains = scope.domains;
  for (const auto& m : c) {
    CompiledMentalLiteral lit;
    lit.negated = m.negated;
    lit.modality = m.modality;
    lit.join.variables = scope.variables;
    lit.join.domains = scope.domains;
    for (const auto& a : m.atoms) lit.join.literals.push_back({false, logic::compile_atom(a, scope, spec_)});
    out.literals.push_back(std::move(lit));
  }
  return out;
}

PropertyRef AgentSystem::closure(const Interpretation& facts) const {
  {
    std::shared_lock lock(cache_mutex_);
    auto it = cache_.find(facts);
    if (it != cache_.end()) return it->second;
  }
  auto model = std::make_shared<const Interpretation>(logic::minimal_model(facts, program_, index_, domains_));
  std::unique_lock lock(cache_mutex_);
  if (cache_.size() >= cache_limit_) cache_.clear();
  auto [it, inserted] = cache_.emplace(facts, model);
  return it->second;
}

std::size_t AgentSystem::cache_size() const {
  std::shared_lock lock(cache_mutex_);
  return cache_.size();
}

Interpretation AgentSystem::initial_beliefs(std::size_t i) const {
  Interpretation b = index_.empty_interpretation();
  for (const auto& atom : spec_.ast.agents[i].beliefs) {
    Binding none;
    b.insert(logic::ground(logic::compile_atom(atom, spec::ScopeTyping{}, spec_), none, index_));
  }
  return b;
}

std::vector<std::vector<AtomId>> AgentSystem::initial_goals(std::size_t i) const {
  std::vector<std::vector<AtomId>> goals;
  for (const auto& conj : spec_.ast.agents[i].goals) {
    std::vector<AtomId> g;
    for (const auto& atom : conj) {
      Binding none;
      g.push_back(logic::ground(logic::compile_atom(atom, spec::ScopeTyping{}, spec_), none, index_));
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    goals.push_back(std::move(g));
  }
  return goals;
}

std::string AgentSystem::render_action(std::size_t action, const Binding& binding) const {
  const auto& a = actions_[action];
  if (a.arity == 0) return a.name;
  std::string out = a.name + "(";
  for (std::size_t i = 0; i < a.arity; ++i) {
    if (i) out += ",";
    out += spec_.constants[binding[i]];
  }
  return out + ")";
}

std::string AgentSystem::render_binding(const std::vector<std::pair<std::string, ConstId>>& binding) const {
  std::string out = "{";
  for (std::size_t i = 0; i < binding.size(); ++i) {
    if (i) out += ", ";
    out += binding[i].first + "=" + spec_.constants[binding[i].second];
  }
  return out + "}";
}

}  // namespace masv::agent
