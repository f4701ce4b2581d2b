#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "masv/agent/mental_state.hpp"
#include "masv/rational.hpp"

namespace masv::ts {

using agent::AgentSystem;
using agent::Binding;
using agent::MentalState;

/// The joint state: one substate per agent, in declaration order.
struct JointState {
  std::vector<MentalState> agents;

  bool operator==(const JointState&) const = default;
  std::size_t hash() const;
};

/// A generated decision. `rule` is empty for the implicit "continue"
/// decision of an agent that is busy with a durative action.
struct Decision {
  std::size_t agent = 0;
  std::optional<std::size_t> rule;
  std::size_t action = 0;
  Binding binding;       // action scope: parameters, then precondition variables
  Binding rule_binding;  // substitution satisfying the rule condition

  bool is_continue() const { return !rule.has_value(); }
  bool operator==(const Decision&) const = default;
};

/// "move(b,table)" or "continue move(b,table)".
std::string describe(const Decision& d, const AgentSystem& sys);

JointState initial_state(const AgentSystem& sys);

/// Enabled decisions ordered by (agent, rule, substitution). A busy agent
/// contributes exactly one continue decision.
std::vector<Decision> enabled_decisions(const JointState& js, const AgentSystem& sys);
std::vector<Decision> enabled_decisions_for(const JointState& js, std::size_t agent, const AgentSystem& sys);

/// Outcome distribution of a decision in `js`: the action's outcome
/// weights when effects land in this step, otherwise {1}.
std::vector<Rational> outcome_weights(const JointState& js, const Decision& d, const AgentSystem& sys);

/// Successor state: sends from the acting agent, the action (or busy
/// countdown), receive rules for every nonempty mailbox, goal update.
/// Throws std::invalid_argument if `outcome` is out of range.
JointState apply_decision(const JointState& js, const Decision& d, std::size_t outcome, const AgentSystem& sys);

/// Every grounding of every safety constraint holds for every agent.
bool is_safe(const JointState& js, const AgentSystem& sys);
/// Every goal base is empty.
bool is_goal(const JointState& js);

struct Bounds {
  std::size_t max_states = 100000;
  std::optional<std::size_t> max_depth;
};

class BoundExceeded : public std::runtime_error {
 public:
  BoundExceeded(std::string bound, std::size_t explored, std::size_t transitions);
  const std::string& bound() const { return bound_; }
  std::size_t states_explored() const { return explored_; }
  std::size_t transitions() const { return transitions_; }

 private:
  std::string bound_;
  std::size_t explored_;
  std::size_t transitions_;
};

struct Transition {
  std::size_t source = 0;
  std::optional<Decision> decision;  // empty: deadlock self-loop
  std::vector<std::pair<Rational, std::size_t>> outcomes;
};

struct StateLabels {
  bool safe = true;
  bool goal = false;
};

struct TransitionSystem {
  std::vector<JointState> states;
  std::size_t initial = 0;
  std::vector<Transition> transitions;
  std::vector<StateLabels> labels;  // empty until label_states
};

/// Breadth-first exploration from the initial joint state. States are
/// numbered in discovery order; deadlocks get a probability-1 self-loop.
TransitionSystem generate_ts(const AgentSystem& sys, const Bounds& bounds = {});

TransitionSystem label_states(TransitionSystem ts, const AgentSystem& sys);

/// Versioned ts.json document with stable key order.
nlohmann::ordered_json to_json(const TransitionSystem& ts, const AgentSystem& sys);
nlohmann::ordered_json state_to_json(const JointState& js, const AgentSystem& sys);

inline constexpr const char* kTsFormat = "masv-ts";
inline constexpr int kTsVersion = 1;

}  // namespace masv::ts
