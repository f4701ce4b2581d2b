#include "masv/runtime/node.hpp"

#include <algorithm>

namespace masv::runtime {

std::string to_string(UpdateKind k) { return k == UpdateKind::belief ? "belief" : "goal"; }
std::string to_string(UpdateOp o) { return o == UpdateOp::insert ? "insert" : "delete"; }

std::optional<SensorUpdate> update_from_json(const nlohmann::json& j, std::string* error) {
  auto fail = [&](std::string msg) -> std::optional<SensorUpdate> {
    if (error) *error = std::move(msg);
    return std::nullopt;
  };
  if (!j.is_object()) return fail("update is not an object");
  for (const char* key : {"agent", "kind", "op", "atom"})
    if (!j.contains(key) || !j[key].is_string()) return fail(std::string("missing string field '") + key + "'");
  SensorUpdate u;
  u.agent = j["agent"];
  const std::string kind = j["kind"], op = j["op"];
  if (kind == "belief") u.kind = UpdateKind::belief;
  else if (kind == "goal") u.kind = UpdateKind::goal;
  else return fail("kind must be 'belief' or 'goal', got '" + kind + "'");
  if (op == "insert") u.op = UpdateOp::insert;
  else if (op == "delete") u.op = UpdateOp::remove;
  else return fail("op must be 'insert' or 'delete', got '" + op + "'");
  u.atom = j["atom"];
  return u;
}

nlohmann::ordered_json to_json(const SensorUpdate& u) {
  nlohmann::ordered_json j;
  j["seq"] = u.seq;
  j["agent"] = u.agent;
  j["kind"] = to_string(u.kind);
  j["op"] = to_string(u.op);
  j["atom"] = u.atom;
  return j;
}

std::uint64_t UpdateQueue::push(SensorUpdate u) {
  std::lock_guard lock(mutex_);
  u.seq = next_seq_++;
  items_.push_back(std::move(u));
  return items_.back().seq;
}

std::vector<SensorUpdate> UpdateQueue::drain() {
  std::lock_guard lock(mutex_);
  std::vector<SensorUpdate> out(std::make_move_iterator(items_.begin()), std::make_move_iterator(items_.end()));
  items_.clear();
  return out;
}

std::size_t UpdateQueue::size() const {
  std::lock_guard lock(mutex_);
  return items_.size();
}

Verdict safety_check(std::span<const PropertyRef> properties, const AgentSystem& sys) {
  Verdict v;
  const auto& groundings = sys.safety_groundings();
  for (std::size_t a = 0; a < properties.size(); ++a) {
    for (const auto& g : groundings) {
      if (logic::holds(*properties[a], g.literals)) continue;
      v.violations.push_back({g.constraint, sys.render_binding(g.binding), sys.agent_name(a)});
    }
  }
  v.safe = v.violations.empty();
  return v;
}

Verdict safety_check(const JointState& js, const AgentSystem& sys) {
  std::vector<PropertyRef> props;
  for (const auto& ms : js.agents) props.push_back(agent::substate_property(ms, sys));
  return safety_check(props, sys);
}

namespace {

/// Splits "a & b" and resolves every conjunct. Empty result on failure.
std::vector<AtomId> resolve_atoms(const std::string& text, bool allow_conjunction, const AgentSystem& sys,
                                  std::string& error) {
  std::vector<AtomId> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t amp = allow_conjunction ? text.find('&', start) : std::string::npos;
    std::string part = text.substr(start, amp == std::string::npos ? std::string::npos : amp - start);
    auto id = sys.index().parse(part);
    if (!id) {
      error = "atom '" + part + "' is not in the atom index";
      return {};
    }
    out.push_back(*id);
    if (amp == std::string::npos) break;
    start = amp + 1;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

DecisionNode::DecisionNode(const AgentSystem& sys, std::uint64_t seed)
    : sys_(sys), current_(ts::initial_state(sys)), rng_(seed) {}

std::optional<std::string> DecisionNode::ingest(SensorUpdate u) {
  if (!sys_.spec().agent_index(u.agent)) return "unknown agent '" + u.agent + "'";
  std::string error;
  if (resolve_atoms(u.atom, u.kind == UpdateKind::goal && u.op == UpdateOp::insert, sys_, error).empty())
    return error;
  queue_.push(std::move(u));
  return std::nullopt;
}

void DecisionNode::apply_update(const SensorUpdate& u, std::vector<bool>& touched) {
  const std::size_t a = *sys_.spec().agent_index(u.agent);
  std::string error;
  auto atoms = resolve_atoms(u.atom, u.kind == UpdateKind::goal && u.op == UpdateOp::insert, sys_, error);
  auto& ms = current_.agents[a];
  touched[a] = true;
  if (u.kind == UpdateKind::belief) {
    if (u.op == UpdateOp::insert) ms.beliefs.insert(atoms.front());
    else ms.beliefs.erase(atoms.front());
  } else if (u.op == UpdateOp::insert) {
    ms.goals.push_back(std::move(atoms));
  } else {
    std::erase_if(ms.goals, [&](const std::vector<AtomId>& g) {
      return std::binary_search(g.begin(), g.end(), atoms.front());
    });
  }
}

std::size_t DecisionNode::sample(const std::vector<Rational>& weights) {
  // u in [0,1) with 53 random bits; first outcome whose cumulative weight exceeds u
  const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  Rational cumulative;
  for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
    cumulative += weights[k];
    if (u < cumulative.to_double()) return k;
  }
  return weights.size() - 1;
}

StepReport DecisionNode::step_once() {
  StepReport r;
  r.step = ++step_;

  r.drained = queue_.drain();
  if (!r.drained.empty()) {
    std::vector<bool> touched(current_.agents.size(), false);
    for (const auto& u : r.drained) apply_update(u, touched);
    for (std::size_t a = 0; a < touched.size(); ++a)
      if (touched[a]) current_.agents[a] = agent::update_goals(std::move(current_.agents[a]), sys_);
  }

  const std::size_t n = current_.agents.size();
  std::vector<ts::Decision> decisions;
  for (std::size_t k = 0; k < n && decisions.empty(); ++k) {
    const std::size_t a = (cursor_ + k) % n;
    decisions = ts::enabled_decisions_for(current_, a, sys_);
    if (!decisions.empty()) cursor_ = (a + 1) % n;
  }
  for (const auto& d : decisions) r.considered.push_back(ts::describe(d, sys_));

  for (auto& d : decisions) {
    Attempt at;
    at.text = ts::describe(d, sys_);
    at.outcome = sample(ts::outcome_weights(current_, d, sys_));
    JointState next = ts::apply_decision(current_, d, at.outcome, sys_);
    std::vector<PropertyRef> props;
    props.reserve(n);
    for (const auto& ms : next.agents) props.push_back(agent::substate_property(ms, sys_));
    auto t0 = std::chrono::steady_clock::now();
    at.verdict = safety_check(props, sys_);
    at.check_ns = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0).count());
    r.check_ns += at.check_ns;
    at.decision = std::move(d);
    const bool safe = at.verdict.safe;
    r.attempts.push_back(std::move(at));
    if (safe) {
      current_ = std::move(next);
      r.committed = true;
      r.state = current_;
      break;
    }
  }
  return r;
}

nlohmann::ordered_json to_json(const StepReport& r, const AgentSystem& sys, bool timings) {
  nlohmann::ordered_json j;
  j["step"] = r.step;
  auto drained = nlohmann::ordered_json::array();
  for (const auto& u : r.drained) drained.push_back(to_json(u));
  j["drained"] = std::move(drained);
  j["considered"] = r.considered;
  auto attempts = nlohmann::ordered_json::array();
  for (const auto& a : r.attempts) {
    nlohmann::ordered_json aj;
    aj["decision"] = a.text;
    aj["agent"] = sys.agent_name(a.decision.agent);
    aj["rule"] = a.decision.rule ? nlohmann::ordered_json(*a.decision.rule) : nlohmann::ordered_json(nullptr);
    aj["outcome"] = a.outcome;
    aj["safe"] = a.verdict.safe;
    auto vs = nlohmann::ordered_json::array();
    for (const auto& v : a.verdict.violations)
      vs.push_back({{"constraint", v.constraint}, {"grounding", v.grounding}, {"agent", v.agent}});
    aj["violations"] = std::move(vs);
    if (timings) aj["check_ns"] = a.check_ns;
    attempts.push_back(std::move(aj));
  }
  j["attempts"] = std::move(attempts);
  j["committed"] = r.committed;
  if (const Attempt* c = r.chosen()) {
    j["chosen"] = c->text;
    j["state"] = ts::state_to_json(*r.state, sys);
  } else {
    j["chosen"] = nullptr;
  }
  if (timings) j["check_ns"] = r.check_ns;
  return j;
}

nlohmann::ordered_json dispatch_record(const StepReport& r, const AgentSystem& sys) {
  const Attempt* c = r.chosen();
  nlohmann::ordered_json j;
  j["step"] = r.step;
  j["agent"] = sys.agent_name(c->decision.agent);
  j["action"] = c->text;
  j["outcome"] = c->outcome;
  return j;
}

Trace run_loop(DecisionNode& node, const Limits& limits, const Sinks& sinks, const Feeder& feeder) {
  Trace trace;
  const auto start = std::chrono::steady_clock::now();
  std::uint64_t idle = 0;
  auto write = [](std::ostream* os, const nlohmann::ordered_json& j, const char* what) {
    if (!os) return;
    *os << j.dump() << '\n' << std::flush;
    if (!*os) throw SinkError(std::string("failed to write ") + what);
  };
  for (std::uint64_t n = 0; n < limits.max_steps; ++n) {
    if (limits.wall_time && std::chrono::steady_clock::now() - start >= *limits.wall_time) {
      trace.reason = StopReason::wall_time;
      return trace;
    }
    if (feeder.before_step) feeder.before_step(node.steps() + 1);
    StepReport r = node.step_once();
    write(sinks.trace, to_json(r, node.system(), sinks.timings), "trace record");
    if (r.committed) write(sinks.dispatch, dispatch_record(r, node.system()), "action command");
    idle = r.committed ? 0 : idle + 1;
    trace.steps.push_back(std::move(r));
    const bool pending = feeder.pending && feeder.pending();
    if (limits.quiesce > 0 && idle >= limits.quiesce && node.queued() == 0 && !pending) {
      trace.reason = StopReason::quiescent;
      return trace;
    }
  }
  trace.reason = StopReason::steps;
  return trace;
}

}  // namespace masv::runtime
