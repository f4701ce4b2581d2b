#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "masv/logic/atom_index.hpp"
#include "masv/logic/evaluate.hpp"
#include "masv/logic/program.hpp"
#include "masv/spec/validate.hpp"

namespace masv::agent {

using logic::Binding;
using logic::Interpretation;
using logic::PatternAtom;

/// One compiled bel(...)/goal(...) conjunct. `join` holds its atoms as
/// positive literals over the enclosing clause's slots.
struct CompiledMentalLiteral {
  bool negated = false;
  spec::Modality modality = spec::Modality::belief;
  logic::Conjunction join;
};

struct CompiledCondition {
  std::vector<CompiledMentalLiteral> literals;
  std::vector<std::string> variables;
  std::vector<DomainId> domains;
};

struct CompiledOutcome {
  Rational weight;
  std::vector<std::pair<bool, PatternAtom>> effects;  // (insert?, atom)
};

struct CompiledAction {
  std::string name;
  std::size_t arity = 0;  // parameters occupy slots [0, arity)
  std::vector<DomainId> param_domains;
  int duration = 1;
  CompiledCondition precondition;
  std::vector<CompiledOutcome> outcomes;
};

struct CompiledDecisionRule {
  CompiledCondition condition;
  std::size_t action = 0;
  std::vector<logic::TermRef> args;
};

struct CompiledSendRule {
  CompiledCondition condition;
  PatternAtom message;
  std::optional<std::size_t> recipient;  // nullopt: all other agents
};

struct CompiledReceiveRule {
  logic::Conjunction pattern;  // single positive literal: the message
  std::optional<std::size_t> sender;
  bool insert = true;
  PatternAtom atom;
};

/// One grounding of one safety constraint over its variables' domains.
struct SafetyGrounding {
  std::size_t constraint = 0;
  std::vector<logic::GroundLiteral> literals;
  std::vector<std::pair<std::string, ConstId>> binding;
};

using PropertyRef = std::shared_ptr<const Interpretation>;

/// Immutable evaluation context for a validated specification: the atom
/// index, compiled knowledge program and clauses, safety groundings, and a
/// thread-safe memo of substate properties keyed by belief sets.
class AgentSystem {
 public:
  explicit AgentSystem(spec::ValidatedSpec spec, std::size_t atom_limit = logic::kDefaultAtomLimit);

  AgentSystem(const AgentSystem&) = delete;
  AgentSystem& operator=(const AgentSystem&) = delete;

  const spec::ValidatedSpec& spec() const { return spec_; }
  const logic::AtomIndex& index() const { return index_; }
  const logic::LogicProgram& program() const { return program_; }
  const std::vector<std::vector<bool>>& domain_tables() const { return domains_; }

  std::size_t agent_count() const { return spec_.ast.agents.size(); }
  const std::string& agent_name(std::size_t i) const { return spec_.ast.agents[i].name; }

  const std::vector<CompiledAction>& actions() const { return actions_; }
  const std::vector<CompiledDecisionRule>& decision_rules() const { return rules_; }
  const std::vector<CompiledSendRule>& send_rules() const { return sends_; }
  const std::vector<CompiledReceiveRule>& receive_rules() const { return receives_; }
  const std::vector<SafetyGrounding>& safety_groundings() const { return safety_; }

  /// Knowledge-base closure of `facts`, memoized. Equal inputs yield the
  /// same pointer while the entry stays cached.
  PropertyRef closure(const Interpretation& facts) const;

  /// Initial belief set of agent `i`.
  Interpretation initial_beliefs(std::size_t i) const;
  /// Initial goal base of agent `i` (each conjunction sorted).
  std::vector<std::vector<AtomId>> initial_goals(std::size_t i) const;

  std::string render_action(std::size_t action, const Binding& binding) const;
  std::string render_binding(const std::vector<std::pair<std::string, ConstId>>& binding) const;

  std::size_t cache_size() const;
  void set_cache_limit(std::size_t n) { cache_limit_ = n; }

 private:
  CompiledCondition compile_condition(const spec::MentalCondition& c, const spec::ScopeTyping& scope) const;

  spec::ValidatedSpec spec_;
  logic::AtomIndex index_;
  logic::LogicProgram program_;
  std::vector<std::vector<bool>> domains_;
  std::vector<CompiledAction> actions_;
  std::vector<CompiledDecisionRule> rules_;
  std::vector<CompiledSendRule> sends_;
  std::vector<CompiledReceiveRule> receives_;
  std::vector<SafetyGrounding> safety_;

  mutable std::shared_mutex cache_mutex_;
  mutable std::unordered_map<Interpretation, PropertyRef, logic::InterpretationHash> cache_;
  std::size_t cache_limit_ = 1u << 18;
};

}  // namespace masv::agent
