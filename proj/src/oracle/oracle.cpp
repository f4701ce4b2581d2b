#include "masv/oracle/oracle.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <vector>

namespace masv::oracle {

namespace {

using Sub = std::map<std::string, std::string>;
using Facts = std::set<std::string>;

std::string render(const spec::Atom& a, const Sub& s) {
  if (a.args.empty()) return a.predicate;
  std::string out = a.predicate + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) out += ",";
    const auto& t = a.args[i];
    out += t.is_variable() ? s.at(t.name) : t.name;
  }
  return out + ")";
}

std::vector<std::string> members(const spec::ValidatedSpec& spec, DomainId d) {
  std::vector<std::string> out;
  for (ConstId c : spec.domains[d].members) out.push_back(spec.constants[c]);
  std::sort(out.begin(), out.end());
  return out;
}

/// Calls `f` for every assignment of the scope's unfixed variables, first
/// variable most significant, values in name order. Stops when f is false.
void enumerate(const spec::ValidatedSpec& spec, const spec::ScopeTyping& scope, Sub sub,
               const std::function<bool(const Sub&)>& f) {
  std::function<bool(std::size_t)> go = [&](std::size_t k) -> bool {
    if (k == scope.variables.size()) return f(sub);
    const auto& v = scope.variables[k];
    if (sub.count(v)) return go(k + 1);
    for (const auto& c : members(spec, scope.domains[k])) {
      sub[v] = c;
      if (!go(k + 1)) return false;
    }
    sub.erase(v);
    return true;
  };
  go(0);
}

std::map<std::string, int> strata_of(const spec::SpecAst& ast) {
  std::map<std::string, int> s;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& r : ast.knowledge) {
      int need = 0;
      for (const auto& l : r.body) need = std::max(need, s[l.atom.predicate] + (l.negated ? 1 : 0));
      if (need > s[r.head.predicate]) {
        s[r.head.predicate] = need;
        changed = true;
      }
    }
  }
  return s;
}

}  // namespace

Facts naive_closure(const spec::ValidatedSpec& spec, const Facts& facts) {
  const auto& ast = spec.ast;
  auto strata = strata_of(ast);
  int top = 0;
  for (const auto& [p, k] : strata) top = std::max(top, k);
  Facts model = facts;
  for (int k = 0; k <= top; ++k) {
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t i = 0; i < ast.knowledge.size(); ++i) {
        const auto& r = ast.knowledge[i];
        if (strata[r.head.predicate] != k) continue;
        Facts found;
        enumerate(spec, spec.knowledge_scopes[i], {}, [&](const Sub& s) {
          for (const auto& l : r.body)
            if (model.count(render(l.atom, s)) == (l.negated ? 1u : 0u)) return true;
          found.insert(render(r.head, s));
          return true;
        });
        for (const auto& a : found) changed = model.insert(a).second || changed;
      }
    }
  }
  return model;
}

namespace {

struct Busy {
  std::size_t action = 0;
  Sub binding;
  int remaining = 0;
};

struct AgentState {
  Facts beliefs;
  std::vector<Facts> goals;
  std::optional<Busy> busy;
};

struct Message {
  std::size_t sender;
  std::string predicate;
  std::vector<std::string> args;
};

using State = std::vector<AgentState>;

class Explorer {
 public:
  Explorer(const spec::ValidatedSpec& spec, std::size_t cap) : spec_(spec), ast_(spec.ast), cap_(cap) {}

  nlohmann::ordered_json run() {
    State init;
    for (const auto& a : ast_.agents) {
      AgentState s;
      for (const auto& b : a.beliefs) s.beliefs.insert(render(b, {}));
      for (const auto& g : a.goals) {
        Facts conj;
        for (const auto& atom : g) conj.insert(render(atom, {}));
        s.goals.push_back(conj);
      }
      drop_achieved(s);
      init.push_back(std::move(s));
    }
    intern(init);

    auto transitions = nlohmann::ordered_json::array();
    for (std::size_t id = 0; id < states_.size(); ++id) {
      const State src = states_[id];
      bool any = false;
      for (std::size_t ai = 0; ai < src.size(); ++ai) {
        for (auto& [rule, text, binding, action] : decisions(src, ai)) {
          any = true;
          const auto& decl = ast_.actions[action];
          bool lands = src[ai].busy ? src[ai].busy->remaining == 1 : decl.duration == 1;
          std::vector<std::pair<Rational, std::size_t>> outs;
          std::size_t n = lands ? decl.outcomes.size() : 1;
          for (std::size_t k = 0; k < n; ++k) {
            State next = step(src, ai, action, binding, k, lands);
            std::size_t target = intern(next, transitions.size());
            Rational w = lands ? decl.outcomes[k].weight : Rational(1);
            bool merged = false;
            for (auto& o : outs)
              if (o.second == target) {
                o.first += w;
                merged = true;
              }
            if (!merged) outs.emplace_back(w, target);
          }
          nlohmann::ordered_json t;
          t["source"] = id;
          t["agent"] = ast_.agents[ai].name;
          t["rule"] = rule ? nlohmann::ordered_json(*rule) : nlohmann::ordered_json(nullptr);
          t["decision"] = text;
          auto arr = nlohmann::ordered_json::array();
          for (const auto& [p, tgt] : outs) arr.push_back({{"probability", p.to_string()}, {"target", tgt}});
          t["outcomes"] = arr;
          transitions.push_back(t);
        }
      }
      if (!any) {
        nlohmann::ordered_json t;
        t["source"] = id;
        t["agent"] = nullptr;
        t["rule"] = nullptr;
        t["decision"] = "loop";
        t["outcomes"] = nlohmann::ordered_json::array({{{"probability", "1"}, {"target", id}}});
        transitions.push_back(t);
      }
    }

    nlohmann::ordered_json doc;
    doc["format"] = "masv-ts";
    doc["version"] = 1;
    auto agents = nlohmann::ordered_json::array();
    for (const auto& a : ast_.agents) agents.push_back(a.name);
    doc["agents"] = agents;
    doc["initial"] = 0;
    auto states = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < states_.size(); ++i) {
      nlohmann::ordered_json s;
      s["id"] = i;
      s["labels"] = {{"safe", safe(states_[i])}, {"goal", goal(states_[i])}};
      s["agents"] = to_json(states_[i]);
      states.push_back(s);
    }
    doc["states"] = states;
    doc["transitions"] = transitions;
    return doc;
  }

 private:
  struct Candidate {
    std::optional<std::size_t> rule;
    std::string text;
    Sub binding;
    std::size_t action;
  };

  std::string action_text(std::size_t action, const Sub& b) const {
    const auto& decl = ast_.actions[action];
    if (decl.params.empty()) return decl.name;
    std::string out = decl.name + "(";
    for (std::size_t i = 0; i < decl.params.size(); ++i) out += (i ? "," : "") + b.at(decl.params[i].variable);
    return out + ")";
  }

  bool condition_holds(const spec::MentalCondition& cond, const AgentState& a, const Sub& s) const {
    Facts bel = naive_closure(spec_, a.beliefs);
    for (const auto& lit : cond) {
      bool holds = false;
      if (lit.modality == spec::Modality::belief) {
        holds = std::all_of(lit.atoms.begin(), lit.atoms.end(),
                            [&](const spec::Atom& x) { return bel.count(render(x, s)) > 0; });
      } else {
        for (const auto& g : a.goals) {
          Facts gc = naive_closure(spec_, g);
          if (std::all_of(lit.atoms.begin(), lit.atoms.end(),
                          [&](const spec::Atom& x) { return gc.count(render(x, s)) > 0; }))
            holds = true;
        }
      }
      if (holds == lit.negated) return false;
    }
    return true;
  }

  std::vector<Sub> solutions(const spec::MentalCondition& cond, const spec::ScopeTyping& scope,
                             const AgentState& a, const Sub& fixed = {}) const {
    std::vector<Sub> out;
    enumerate(spec_, scope, fixed, [&](const Sub& s) {
      if (condition_holds(cond, a, s)) out.push_back(s);
      return true;
    });
    return out;
  }

  std::vector<Candidate> decisions(const State& st, std::size_t ai) const {
    const AgentState& a = st[ai];
    if (a.busy) return {{std::nullopt, "continue " + action_text(a.busy->action, a.busy->binding), a.busy->binding,
                         a.busy->action}};
    std::vector<Candidate> out;
    for (std::size_t ri = 0; ri < ast_.decision_rules.size(); ++ri) {
      const auto& rule = ast_.decision_rules[ri];
      std::size_t action = 0;
      while (ast_.actions[action].name != rule.action) ++action;
      const auto& decl = ast_.actions[action];
      for (const Sub& s : solutions(rule.condition, spec_.rule_scopes[ri], a)) {
        Sub params;
        bool ok = true;
        for (std::size_t k = 0; k < rule.args.size(); ++k) {
          std::string v = rule.args[k].is_variable() ? s.at(rule.args[k].name) : rule.args[k].name;
          auto dom = members(spec_, spec_.action_param_domains[action][k]);
          ok = ok && std::find(dom.begin(), dom.end(), v) != dom.end();
          params[decl.params[k].variable] = v;
        }
        if (!ok) continue;
        std::optional<Sub> first;
        enumerate(spec_, spec_.action_scopes[action], params, [&](const Sub& b) {
          if (!condition_holds(decl.precondition, a, b)) return true;
          first = b;
          return false;
        });
        if (first) out.push_back({ri, action_text(action, *first), *first, action});
      }
    }
    return out;
  }

  void drop_achieved(AgentState& a) const {
    if (a.goals.empty()) return;
    Facts bel = naive_closure(spec_, a.beliefs);
    std::vector<Facts> kept;
    for (const auto& g : a.goals)
      if (!std::includes(bel.begin(), bel.end(), g.begin(), g.end())) kept.push_back(g);
    a.goals = kept;
  }

  State step(const State& src, std::size_t ai, std::size_t action, const Sub& binding, std::size_t outcome,
             bool lands) const {
    State next = src;
    std::vector<std::vector<Message>> mail(src.size());
    for (std::size_t si = 0; si < ast_.send_rules.size(); ++si) {
      const auto& send = ast_.send_rules[si];
      for (const Sub& s : solutions(send.condition, spec_.send_scopes[si], src[ai])) {
        Message m{ai, send.message.predicate, {}};
        for (const auto& t : send.message.args) m.args.push_back(t.is_variable() ? s.at(t.name) : t.name);
        for (std::size_t r = 0; r < src.size(); ++r) {
          bool to = send.recipient ? ast_.agents[r].name == *send.recipient : r != ai;
          if (to) mail[r].push_back(m);
        }
      }
    }

    AgentState& me = next[ai];
    if (lands) {
      me.busy.reset();
      const auto& effects = ast_.actions[action].outcomes[outcome].effects;
      for (const auto& e : effects)
        if (!e.insert) me.beliefs.erase(render(e.atom, binding));
      for (const auto& e : effects)
        if (e.insert) me.beliefs.insert(render(e.atom, binding));
    } else if (me.busy) {
      me.busy->remaining -= 1;
    } else {
      me.busy = Busy{action, binding, ast_.actions[action].duration - 1};
    }

    for (std::size_t r = 0; r < next.size(); ++r) {
      if (mail[r].empty()) continue;
      for (std::size_t ri = 0; ri < ast_.receive_rules.size(); ++ri) {
        const auto& rule = ast_.receive_rules[ri];
        const auto& scope = spec_.receive_scopes[ri];
        for (const auto& m : mail[r]) {
          if (rule.sender && ast_.agents[m.sender].name != *rule.sender) continue;
          if (rule.message.predicate != m.predicate || rule.message.args.size() != m.args.size()) continue;
          Sub s;
          bool ok = true;
          for (std::size_t k = 0; ok && k < m.args.size(); ++k) {
            const auto& t = rule.message.args[k];
            if (!t.is_variable()) {
              ok = t.name == m.args[k];
            } else if (s.count(t.name)) {
              ok = s[t.name] == m.args[k];
            } else {
              auto dom = members(spec_, scope.domains[*scope.slot(t.name)]);
              ok = std::find(dom.begin(), dom.end(), m.args[k]) != dom.end();
              s[t.name] = m.args[k];
            }
          }
          if (!ok) continue;
          if (rule.insert) next[r].beliefs.insert(render(rule.atom, s));
          else next[r].beliefs.erase(render(rule.atom, s));
        }
      }
    }
    for (std::size_t r = 0; r < next.size(); ++r)
      if (r == ai || !mail[r].empty()) drop_achieved(next[r]);
    return next;
  }

  bool safe(const State& st) const {
    for (const auto& a : st) {
      Facts bel = naive_closure(spec_, a.beliefs);
      for (std::size_t ci = 0; ci < ast_.safety.size(); ++ci) {
        bool ok = true;
        enumerate(spec_, spec_.safety_scopes[ci], {}, [&](const Sub& s) {
          for (const auto& l : ast_.safety[ci].literals)
            if ((bel.count(render(l.atom, s)) > 0) == l.negated) ok = false;
          return ok;
        });
        if (!ok) return false;
      }
    }
    return true;
  }

  static bool goal(const State& st) {
    return std::all_of(st.begin(), st.end(), [](const AgentState& a) { return a.goals.empty(); });
  }

  nlohmann::ordered_json to_json(const State& st) const {
    auto arr = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < st.size(); ++i) {
      const auto& a = st[i];
      nlohmann::ordered_json j;
      j["name"] = ast_.agents[i].name;
      j["beliefs"] = std::vector<std::string>(a.beliefs.begin(), a.beliefs.end());
      auto goals = nlohmann::ordered_json::array();
      for (const auto& g : a.goals) goals.push_back(std::vector<std::string>(g.begin(), g.end()));
      j["goals"] = goals;
      if (a.busy) {
        nlohmann::ordered_json b;
        b["action"] = action_text(a.busy->action, a.busy->binding);
        auto binding = nlohmann::ordered_json::array();
        for (const auto& v : spec_.action_scopes[a.busy->action].variables) binding.push_back(a.busy->binding.at(v));
        b["binding"] = binding;
        b["remaining"] = a.busy->remaining;
        j["busy"] = b;
      } else {
        j["busy"] = nullptr;
      }
      arr.push_back(j);
    }
    return arr;
  }

  std::size_t intern(const State& s, std::size_t transitions = 0) {
    std::string key = to_json(s).dump();
    auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    if (states_.size() >= cap_) throw CapExceeded(cap_, transitions);
    ids_.emplace(key, states_.size());
    states_.push_back(s);
    return states_.size() - 1;
  }

  const spec::ValidatedSpec& spec_;
  const spec::SpecAst& ast_;
  std::size_t cap_;
  std::vector<State> states_;
  std::map<std::string, std::size_t> ids_;
};

}  // namespace

nlohmann::ordered_json oracle_ts(const spec::ValidatedSpec& spec, std::size_t cap) {
  return Explorer(spec, cap).run();
}

}  // namespace masv::oracle
