#pragma once

#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "masv/agent/system.hpp"

namespace masv::agent {

struct Message {
  std::size_t sender = 0;
  AtomId atom = 0;
  bool operator==(const Message&) const = default;
};

/// A durative action in progress. `binding` covers the whole action
/// scope (parameters first, then precondition variables).
struct BusyAction {
  std::size_t action = 0;
  Binding binding;
  int remaining = 1;
  bool operator==(const BusyAction&) const = default;
};

/// One agent's substate: belief facts (before knowledge closure), the goal
/// base as ordered ground conjunctions, a mailbox, and an optional
/// durative action in progress.
struct MentalState {
  Interpretation beliefs;
  std::vector<std::vector<AtomId>> goals;  // each conjunction sorted ascending
  std::vector<Message> mailbox;
  std::optional<BusyAction> busy;

  bool operator==(const MentalState&) const = default;
  std::size_t hash() const;
};

struct GroundEffect {
  bool insert = true;
  AtomId atom = 0;
};

/// Initial mental state of agent `i` with achieved goals already dropped.
MentalState initial_mental_state(std::size_t i, const AgentSystem& sys);

/// Minimal model of beliefs ∪ knowledge.
PropertyRef substate_property(const MentalState& ms, const AgentSystem& sys);

/// Solutions of a mental-state condition, extending `initial` (empty or
/// sized to the condition's slots). bel(φ) is checked against the substate
/// property; goal(φ) holds when some single goal's knowledge closure
/// contains every atom of φ. Results are sorted by slot order.
std::vector<Binding> eval_msc(const MentalState& ms, const CompiledCondition& cond, const AgentSystem& sys,
                              const Binding& initial = {});

/// Named view of eval_msc results.
std::vector<logic::Substitution> to_substitutions(const std::vector<Binding>& solutions,
                                                  const CompiledCondition& cond);

/// Drops every goal conjunction already contained in the substate property.
MentalState update_goals(MentalState ms, const AgentSystem& sys);

/// Applies deletes, then inserts, then update_goals.
MentalState apply_effects(MentalState ms, std::span<const GroundEffect> effects, const AgentSystem& sys);

/// Canonical JSON form: sorted belief strings, goals as sorted string lists
/// in goal order, busy action (or null); mailbox only when nonempty.
nlohmann::ordered_json to_json(const MentalState& ms, const AgentSystem& sys);

}  // namespace masv::agent
