#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "masv/ts/transition_system.hpp"

namespace masv::runtime {

using agent::AgentSystem;
using agent::PropertyRef;
using ts::JointState;

enum class UpdateKind { belief, goal };
enum class UpdateOp { insert, remove };

/// A ground-predicate update produced by data processing. For goal
/// inserts `atom` may be a conjunction written "a & b".
struct SensorUpdate {
  std::string agent;
  UpdateKind kind = UpdateKind::belief;
  UpdateOp op = UpdateOp::insert;
  std::string atom;
  std::uint64_t seq = 0;  // assigned by the queue
};

std::string to_string(UpdateKind k);
std::string to_string(UpdateOp o);
std::optional<SensorUpdate> update_from_json(const nlohmann::json& j, std::string* error = nullptr);
nlohmann::ordered_json to_json(const SensorUpdate& u);

/// Multi-producer FIFO. Arrival numbers are assigned under the lock, so
/// they define the order among concurrent producers.
class UpdateQueue {
 public:
  std::uint64_t push(SensorUpdate u);
  std::vector<SensorUpdate> drain();
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::deque<SensorUpdate> items_;
  std::uint64_t next_seq_ = 0;
};

struct Violation {
  std::size_t constraint = 0;
  std::string grounding;  // "{X=a}"
  std::string agent;
};

struct Verdict {
  bool safe = true;
  std::vector<Violation> violations;
};

/// Checks every safety grounding against every agent's property.
/// Cost depends on the constraint table and agent count only.
Verdict safety_check(std::span<const PropertyRef> properties, const AgentSystem& sys);
Verdict safety_check(const JointState& js, const AgentSystem& sys);

struct Attempt {
  ts::Decision decision;
  std::string text;
  std::size_t outcome = 0;
  Verdict verdict;
  std::uint64_t check_ns = 0;
};

struct StepReport {
  std::uint64_t step = 0;
  std::vector<SensorUpdate> drained;
  std::vector<std::string> considered;
  std::vector<Attempt> attempts;
  bool committed = false;  // the last attempt was safe and is now current
  std::uint64_t check_ns = 0;
  std::optional<JointState> state;  // committed state

  const Attempt* chosen() const { return committed ? &attempts.back() : nullptr; }
  bool unsafe_only() const { return !committed && !attempts.empty(); }
};

/// One decision per step: drain sensor updates, pick the next agent with
/// something to do, try its decisions in order and commit the first one
/// whose successor passes the safety check.
class DecisionNode {
 public:
  DecisionNode(const AgentSystem& sys, std::uint64_t seed);

  /// Validates and enqueues. Returns a diagnostic when the update names an
  /// unknown agent or an atom outside the Herbrand base. Thread-safe.
  std::optional<std::string> ingest(SensorUpdate u);

  StepReport step_once();

  const JointState& current() const { return current_; }
  const AgentSystem& system() const { return sys_; }
  std::size_t cursor() const { return cursor_; }
  std::uint64_t steps() const { return step_; }
  std::size_t queued() const { return queue_.size(); }

 private:
  void apply_update(const SensorUpdate& u, std::vector<bool>& touched);
  std::size_t sample(const std::vector<Rational>& weights);

  const AgentSystem& sys_;
  JointState current_;
  std::size_t cursor_ = 0;
  std::uint64_t step_ = 0;
  std::mt19937_64 rng_;
  UpdateQueue queue_;
};

class SinkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Limits {
  std::uint64_t max_steps = 10000;
  std::optional<std::chrono::milliseconds> wall_time;
  std::uint64_t quiesce = 3;
};

struct Sinks {
  std::ostream* trace = nullptr;
  std::ostream* dispatch = nullptr;
  bool timings = false;  // include check_ns in trace records
};

/// Optional producer hooked into the loop: `before_step(n)` runs before
/// step n; while `pending()` is true the loop does not declare quiescence.
struct Feeder {
  std::function<void(std::uint64_t)> before_step;
  std::function<bool()> pending;
};

enum class StopReason { steps, wall_time, quiescent };

struct Trace {
  std::vector<StepReport> steps;
  StopReason reason = StopReason::steps;
};

Trace run_loop(DecisionNode& node, const Limits& limits, const Sinks& sinks = {}, const Feeder& feeder = {});

nlohmann::ordered_json to_json(const StepReport& r, const AgentSystem& sys, bool timings = false);
nlohmann::ordered_json dispatch_record(const StepReport& r, const AgentSystem& sys);

}  // namespace masv::runtime
