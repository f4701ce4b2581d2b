#include "masv/agent/mental_state.hpp"

#include <algorithm>

namespace masv::agent {

std::size_t MentalState::hash() const {
  std::size_t h = beliefs.hash();
  auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  for (const auto& g : goals) {
    mix(g.size());
    for (AtomId a : g) mix(a);
  }
  for (const auto& m : mailbox) {
    mix(m.sender);
    mix(m.atom);
  }
  if (busy) {
    mix(busy->action + 1);
    mix(static_cast<std::size_t>(busy->remaining));
    for (ConstId c : busy->binding) mix(c);
  }
  return h;
}

MentalState initial_mental_state(std::size_t i, const AgentSystem& sys) {
  MentalState ms;
  ms.beliefs = sys.initial_beliefs(i);
  ms.goals = sys.initial_goals(i);
  return update_goals(std::move(ms), sys);
}

PropertyRef substate_property(const MentalState& ms, const AgentSystem& sys) {
  return sys.closure(ms.beliefs);
}

namespace {

PropertyRef goal_property(const std::vector<AtomId>& goal, const AgentSystem& sys) {
  Interpretation g = sys.index().empty_interpretation();
  for (AtomId a : goal) g.insert(a);
  return sys.closure(g);
}

/// All atoms of `join` hold in `model` under the fully bound `binding`.
bool all_hold(const logic::Conjunction& join, const Binding& binding, const Interpretation& model,
              const logic::AtomIndex& index) {
  ConstId args[16];
  for (const auto& lit : join.literals) {
    for (std::size_t i = 0; i < lit.atom.args.size(); ++i) {
      const auto& t = lit.atom.args[i];
      args[i] = t.variable ? binding[t.value] : t.value;
    }
    auto id = index.find(lit.atom.predicate, std::span<const ConstId>(args, lit.atom.args.size()));
    if (!id || !model.contains(*id)) return false;
  }
  return true;
}

class ConditionSolver {
 public:
  ConditionSolver(const MentalState& ms, const CompiledCondition& cond, const AgentSystem& sys)
      : cond_(cond), sys_(sys), joiner_(sys.index(), sys.domain_tables()) {
    beliefs_ = substate_property(ms, sys);
    for (const auto& g : ms.goals) goals_.push_back(goal_property(g, sys));
    for (std::size_t i = 0; i < cond.literals.size(); ++i)
      (cond.literals[i].negated ? negatives_ : positives_).push_back(i);
  }

  std::vector<Binding> solve(Binding binding) {
    binding.resize(cond_.variables.size(), logic::kUnbound);
    descend(0, binding);
    std::sort(out_.begin(), out_.end());
    out_.erase(std::unique(out_.begin(), out_.end()), out_.end());
    return std::move(out_);
  }

 private:
  void descend(std::size_t k, Binding& binding) {
    if (k == positives_.size()) {
      for (std::size_t n : negatives_) {
        const auto& lit = cond_.literals[n];
        if (lit.modality == spec::Modality::belief) {
          if (all_hold(lit.join, binding, *beliefs_, sys_.index())) return;
        } else {
          for (const auto& g : goals_)
            if (all_hold(lit.join, binding, *g, sys_.index())) return;
        }
      }
      out_.push_back(binding);
      return;
    }
    const auto& lit = cond_.literals[positives_[k]];
    static const std::vector<const Interpretation*> kNoSources;
    auto next = [&](const Binding&) {
      descend(k + 1, binding);
      return true;
    };
    if (lit.modality == spec::Modality::belief) {
      joiner_.run(lit.join, kNoSources, *beliefs_, *beliefs_, binding, -1, next);
    } else {
      for (const auto& g : goals_) joiner_.run(lit.join, kNoSources, *g, *g, binding, -1, next);
    }
  }

  const CompiledCondition& cond_;
  const AgentSystem& sys_;
  logic::Joiner joiner_;
  PropertyRef beliefs_;
  std::vector<PropertyRef> goals_;
  std::vector<std::size_t> positives_, negatives_;
  std::vector<Binding> out_;
};

}  // namespace

std::vector<Binding> eval_msc(const MentalState& ms, const CompiledCondition& cond, const AgentSystem& sys,
                              const Binding& initial) {
  return ConditionSolver(ms, cond, sys).solve(initial);
}

std::vector<logic::Substitution> to_substitutions(const std::vector<Binding>& solutions,
                                                  const CompiledCondition& cond) {
  std::vector<logic::Substitution> out;
  for (const auto& b : solutions) {
    logic::Substitution s;
    for (std::size_t i = 0; i < cond.variables.size(); ++i) s.bindings.emplace_back(cond.variables[i], b[i]);
    out.push_back(std::move(s));
  }
  return out;
}

MentalState update_goals(MentalState ms, const AgentSystem& sys) {
  if (ms.goals.empty()) return ms;
  PropertyRef prop = substate_property(ms, sys);
  std::erase_if(ms.goals, [&](const std::vector<AtomId>& g) {
    return std::all_of(g.begin(), g.end(), [&](AtomId a) { return prop->contains(a); });
  });
  return ms;
}

MentalState apply_effects(MentalState ms, std::span<const GroundEffect> effects, const AgentSystem& sys) {
  for (const auto& e : effects)
    if (!e.insert) ms.beliefs.erase(e.atom);
  for (const auto& e : effects)
    if (e.insert) ms.beliefs.insert(e.atom);
  return update_goals(std::move(ms), sys);
}

nlohmann::ordered_json to_json(const MentalState& ms, const AgentSystem& sys) {
  const auto& index = sys.index();
  nlohmann::ordered_json j;
  j["beliefs"] = index.to_strings(ms.beliefs);
  auto goals = nlohmann::ordered_json::array();
  for (const auto& g : ms.goals) goals.push_back(index.to_strings(g));
  j["goals"] = std::move(goals);
  if (ms.busy) {
    nlohmann::ordered_json b;
    b["action"] = sys.render_action(ms.busy->action, ms.busy->binding);
    auto binding = nlohmann::ordered_json::array();
    for (ConstId c : ms.busy->binding) binding.push_back(sys.spec().constants[c]);
    b["binding"] = std::move(binding);
    b["remaining"] = ms.busy->remaining;
    j["busy"] = std::move(b);
  } else {
    j["busy"] = nullptr;
  }
  if (!ms.mailbox.empty()) {
    auto mail = nlohmann::ordered_json::array();
    for (const auto& m : ms.mailbox)
      mail.push_back({{"from", sys.agent_name(m.sender)}, {"atom", index.to_string(m.atom)}});
    j["mailbox"] = std::move(mail);
  }
  return j;
}

}  // namespace masv::agent
