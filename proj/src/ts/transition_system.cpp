#include "masv/ts/transition_system.hpp"

#include <iterator>
#include <unordered_map>

namespace masv::ts {

std::size_t JointState::hash() const {
  std::size_t h = agents.size();
  for (const auto& a : agents) h ^= a.hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::string describe(const Decision& d, const AgentSystem& sys) {
  std::string act = sys.render_action(d.action, d.binding);
  return d.is_continue() ? "continue " + act : act;
}

JointState initial_state(const AgentSystem& sys) {
  JointState js;
  for (std::size_t i = 0; i < sys.agent_count(); ++i) js.agents.push_back(agent::initial_mental_state(i, sys));
  return js;
}

std::vector<Decision> enabled_decisions_for(const JointState& js, std::size_t ai, const AgentSystem& sys) {
  std::vector<Decision> out;
  const MentalState& ms = js.agents[ai];
  if (ms.busy) {
    Decision d;
    d.agent = ai;
    d.action = ms.busy->action;
    d.binding = ms.busy->binding;
    out.push_back(std::move(d));
    return out;
  }
  const auto& rules = sys.decision_rules();
  for (std::size_t ri = 0; ri < rules.size(); ++ri) {
    const auto& rule = rules[ri];
    const auto& action = sys.actions()[rule.action];
    for (const Binding& sol : agent::eval_msc(ms, rule.condition, sys)) {
      Binding params(action.arity);
      bool in_domain = true;
      for (std::size_t k = 0; k < action.arity; ++k) {
        const auto& t = rule.args[k];
        params[k] = t.variable ? sol[t.value] : t.value;
        in_domain = in_domain && sys.domain_tables()[action.param_domains[k]][params[k]];
      }
      if (!in_domain) continue;
      auto pre = agent::eval_msc(ms, action.precondition, sys, params);
      if (pre.empty()) continue;
      Decision d;
      d.agent = ai;
      d.rule = ri;
      d.action = rule.action;
      d.binding = std::move(pre.front());
      d.rule_binding = sol;
      out.push_back(std::move(d));
    }
  }
  return out;
}

std::vector<Decision> enabled_decisions(const JointState& js, const AgentSystem& sys) {
  std::vector<Decision> out;
  for (std::size_t ai = 0; ai < js.agents.size(); ++ai) {
    auto mine = enabled_decisions_for(js, ai, sys);
    std::move(mine.begin(), mine.end(), std::back_inserter(out));
  }
  return out;
}

namespace {

bool effects_land_now(const JointState& js, const Decision& d, const AgentSystem& sys) {
  if (d.is_continue()) return js.agents[d.agent].busy->remaining <= 1;
  return sys.actions()[d.action].duration <= 1;
}

std::vector<agent::GroundEffect> ground_effects(const agent::CompiledOutcome& o, const Binding& b,
                                                const AgentSystem& sys) {
  std::vector<agent::GroundEffect> out;
  for (const auto& [insert, pat] : o.effects) out.push_back({insert, logic::ground(pat, b, sys.index())});
  return out;
}

/// Binds `pattern` (one positive literal) against a concrete message atom.
bool match_message(const logic::Conjunction& pattern, AtomId message, Binding& binding, const AgentSystem& sys) {
  const auto& pat = pattern.literals.front().atom;
  const auto& index = sys.index();
  if (index.predicate_of(message) != pat.predicate) return false;
  auto args = index.args(message);
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto& t = pat.args[i];
    if (!t.variable) {
      if (t.value != args[i]) return false;
    } else if (binding[t.value] == logic::kUnbound) {
      if (!sys.domain_tables()[pattern.domains[t.value]][args[i]]) return false;
      binding[t.value] = args[i];
    } else if (binding[t.value] != args[i]) {
      return false;
    }
  }
  return true;
}

}  // namespace

std::vector<Rational> outcome_weights(const JointState& js, const Decision& d, const AgentSystem& sys) {
  if (!effects_land_now(js, d, sys)) return {Rational(1)};
  std::vector<Rational> w;
  for (const auto& o : sys.actions()[d.action].outcomes) w.push_back(o.weight);
  return w;
}

JointState apply_decision(const JointState& js, const Decision& d, std::size_t outcome, const AgentSystem& sys) {
  if (d.agent >= js.agents.size()) throw std::invalid_argument("decision names an unknown agent");
  const MentalState& before = js.agents[d.agent];
  if (d.is_continue() != before.busy.has_value())
    throw std::invalid_argument("decision does not match the agent's busy state");
  const bool lands = effects_land_now(js, d, sys);
  const auto& action = sys.actions()[d.action];
  if (outcome >= (lands ? action.outcomes.size() : 1)) throw std::invalid_argument("outcome index out of range");

  JointState next = js;
  std::vector<bool> changed(js.agents.size(), false);
  changed[d.agent] = true;

  // (1) messages from the acting agent, evaluated on its pre-decision state
  for (const auto& send : sys.send_rules()) {
    for (const Binding& sol : agent::eval_msc(before, send.condition, sys)) {
      AtomId msg = logic::ground(send.message, sol, sys.index());
      if (send.recipient) {
        next.agents[*send.recipient].mailbox.push_back({d.agent, msg});
      } else {
        for (std::size_t r = 0; r < next.agents.size(); ++r)
          if (r != d.agent) next.agents[r].mailbox.push_back({d.agent, msg});
      }
    }
  }

  // (2) the action itself
  MentalState& me = next.agents[d.agent];
  if (lands) {
    me.busy.reset();
    auto effects = ground_effects(action.outcomes[outcome], d.binding, sys);
    me = agent::apply_effects(std::move(me), effects, sys);
  } else if (d.is_continue()) {
    me.busy->remaining -= 1;
  } else {
    me.busy = agent::BusyAction{d.action, d.binding, action.duration - 1};
  }

  // (3) every nonempty mailbox is drained within the same transition
  for (std::size_t r = 0; r < next.agents.size(); ++r) {
    MentalState& ms = next.agents[r];
    if (ms.mailbox.empty()) continue;
    changed[r] = true;
    for (const auto& rule : sys.receive_rules()) {
      for (const auto& m : ms.mailbox) {
        if (rule.sender && *rule.sender != m.sender) continue;
        Binding b(rule.pattern.variables.size(), logic::kUnbound);
        if (!match_message(rule.pattern, m.atom, b, sys)) continue;
        AtomId atom = logic::ground(rule.atom, b, sys.index());
        if (rule.insert) ms.beliefs.insert(atom);
        else ms.beliefs.erase(atom);
      }
    }
    ms.mailbox.clear();
  }

  // (4)
  for (std::size_t r = 0; r < next.agents.size(); ++r)
    if (changed[r]) next.agents[r] = agent::update_goals(std::move(next.agents[r]), sys);
  return next;
}

bool is_safe(const JointState& js, const AgentSystem& sys) {
  const auto& groundings = sys.safety_groundings();
  if (groundings.empty()) return true;
  for (const auto& ms : js.agents) {
    auto prop = agent::substate_property(ms, sys);
    for (const auto& g : groundings)
      if (!logic::holds(*prop, g.literals)) return false;
  }
  return true;
}

bool is_goal(const JointState& js) {
  for (const auto& ms : js.agents)
    if (!ms.goals.empty()) return false;
  return true;
}

BoundExceeded::BoundExceeded(std::string bound, std::size_t explored, std::size_t transitions)
    : std::runtime_error("bound " + bound + " exceeded after exploring " + std::to_string(explored) +
                         " states and " + std::to_string(transitions) + " transitions"),
      bound_(std::move(bound)),
      explored_(explored),
      transitions_(transitions) {}

TransitionSystem generate_ts(const AgentSystem& sys, const Bounds& bounds) {
  TransitionSystem ts;
  std::unordered_multimap<std::size_t, std::size_t> by_hash;
  std::vector<std::size_t> depth;

  auto intern = [&](JointState&& s, std::size_t d) -> std::size_t {
    const std::size_t h = s.hash();
    auto [lo, hi] = by_hash.equal_range(h);
    for (auto it = lo; it != hi; ++it)
      if (ts.states[it->second] == s) return it->second;
    if (ts.states.size() >= bounds.max_states)
      throw BoundExceeded("max-states=" + std::to_string(bounds.max_states), ts.states.size(),
                          ts.transitions.size());
    if (bounds.max_depth && d > *bounds.max_depth)
      throw BoundExceeded("max-depth=" + std::to_string(*bounds.max_depth), ts.states.size(),
                          ts.transitions.size());
    ts.states.push_back(std::move(s));
    depth.push_back(d);
    by_hash.emplace(h, ts.states.size() - 1);
    return ts.states.size() - 1;
  };

  intern(initial_state(sys), 0);
  for (std::size_t id = 0; id < ts.states.size(); ++id) {
    const JointState source = ts.states[id];
    auto decisions = enabled_decisions(source, sys);
    if (decisions.empty()) {
      ts.transitions.push_back({id, std::nullopt, {{Rational(1), id}}});
      continue;
    }
    for (auto& d : decisions) {
      auto weights = outcome_weights(source, d, sys);
      Transition t;
      t.source = id;
      for (std::size_t k = 0; k < weights.size(); ++k) {
        std::size_t target = intern(apply_decision(source, d, k, sys), depth[id] + 1);
        auto same = std::find_if(t.outcomes.begin(), t.outcomes.end(),
                                 [&](const auto& o) { return o.second == target; });
        if (same != t.outcomes.end()) same->first += weights[k];
        else t.outcomes.emplace_back(weights[k], target);
      }
      t.decision = std::move(d);
      ts.transitions.push_back(std::move(t));
    }
  }
  return ts;
}

TransitionSystem label_states(TransitionSystem ts, const AgentSystem& sys) {
  ts.labels.clear();
  ts.labels.reserve(ts.states.size());
  for (const auto& s : ts.states) ts.labels.push_back({is_safe(s, sys), is_goal(s)});
  return ts;
}

nlohmann::ordered_json state_to_json(const JointState& js, const AgentSystem& sys) {
  auto agents = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < js.agents.size(); ++i) {
    nlohmann::ordered_json a;
    a["name"] = sys.agent_name(i);
    auto body = agent::to_json(js.agents[i], sys);
    for (auto& [k, v] : body.items()) a[k] = std::move(v);
    agents.push_back(std::move(a));
  }
  return agents;
}

nlohmann::ordered_json to_json(const TransitionSystem& ts, const AgentSystem& sys) {
  nlohmann::ordered_json doc;
  doc["format"] = kTsFormat;
  doc["version"] = kTsVersion;
  auto agents = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < sys.agent_count(); ++i) agents.push_back(sys.agent_name(i));
  doc["agents"] = std::move(agents);
  doc["initial"] = ts.initial;
  auto states = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < ts.states.size(); ++i) {
    nlohmann::ordered_json s;
    s["id"] = i;
    if (i < ts.labels.size()) s["labels"] = {{"safe", ts.labels[i].safe}, {"goal", ts.labels[i].goal}};
    s["agents"] = state_to_json(ts.states[i], sys);
    states.push_back(std::move(s));
  }
  doc["states"] = std::move(states);
  auto transitions = nlohmann::ordered_json::array();
  for (const auto& t : ts.transitions) {
    nlohmann::ordered_json j;
    j["source"] = t.source;
    if (t.decision) {
      j["agent"] = sys.agent_name(t.decision->agent);
      j["rule"] = t.decision->rule ? nlohmann::ordered_json(*t.decision->rule) : nlohmann::ordered_json(nullptr);
      j["decision"] = describe(*t.decision, sys);
    } else {
      j["agent"] = nullptr;
      j["rule"] = nullptr;
      j["decision"] = "loop";
    }
    auto outs = nlohmann::ordered_json::array();
    for (const auto& [p, target] : t.outcomes) outs.push_back({{"probability", p.to_string()}, {"target", target}});
    j["outcomes"] = std::move(outs);
    transitions.push_back(std::move(j));
  }
  doc["transitions"] = std::move(transitions);
  return doc;
}

}  // namespace masv::ts
