// masv: check, compile, run and cross-check GOAL-style decision specs.
//
// Exit codes: 0 ok, 1 invalid spec, 2 I/O failure, 3 bound exceeded,
// 4 run finished but some step had only unsafe decisions, 5 trace or
// dispatch sink failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "masv/oracle/oracle.hpp"
#include "masv/prism/encode.hpp"
#include "masv/runtime/node.hpp"
#include "masv/sensor/sensor.hpp"
#include "masv/spec/validate.hpp"

namespace fs = std::filesystem;
using namespace masv;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kIo = 2, kBound = 3, kUnsafe = 4, kSink = 5 };

struct IoError {
  std::string message;
};

// MASV_LOG=quiet|info|debug (default info)
int log_level() {
  static const int level = [] {
    const char* v = std::getenv("MASV_LOG");
    std::string s = v ? v : "info";
    if (s == "quiet" || s == "0") return 0;
    if (s == "debug" || s == "2") return 2;
    return 1;
  }();
  return level;
}

void debug(const std::string& msg) {
  if (log_level() >= 2) std::cerr << "masv: " << msg << '\n';
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError{"cannot read '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw IoError{"cannot write '" + path.string() + "'"};
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError{"cannot create output directory '" + dir.string() + "'"};
}

/// Loads and validates; prints diagnostics. Empty on invalid specs.
std::optional<spec::ValidatedSpec> load(const std::string& path) {
  auto text = read_file(path);
  auto r = spec::load_spec(text);
  if (log_level() >= 1 || !r)
    for (const auto& d : r.diagnostics) std::cerr << d.format(path) << '\n';
  return std::move(r.spec);
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(1) + "\n"; }

int cmd_check(const std::string& path) {
  auto spec = load(path);
  if (!spec) return kInvalid;
  std::cout << path << ": ok (" << spec->agent_count() << " agents, " << spec->ast.actions.size() << " actions, "
            << spec->ast.decision_rules.size() << " rules, " << spec->strata.count() << " strata)\n";
  return kOk;
}

int cmd_compile(const std::string& path, const std::string& out, const ts::Bounds& bounds) {
  auto spec = load(path);
  if (!spec) return kInvalid;
  ensure_dir(out);
  std::unique_ptr<agent::AgentSystem> sys;
  try {
    sys = std::make_unique<agent::AgentSystem>(std::move(*spec));
  } catch (const logic::CapacityError& e) {
    std::cerr << "masv: " << e.what() << '\n';
    return kBound;
  }
  ts::TransitionSystem system;
  try {
    system = ts::label_states(ts::generate_ts(*sys, bounds), *sys);
  } catch (const ts::BoundExceeded& e) {
    std::cerr << "masv: " << e.what() << '\n';
    std::cout << "states: " << e.states_explored() << "\ntransitions: " << e.transitions() << "\n";
    return kBound;
  }
  auto art = prism::encode_prism(system, *sys);
  write_file(fs::path(out) / "ts.json", dump(ts::to_json(system, *sys)));
  write_file(fs::path(out) / "model.prism", art.model_text);
  write_file(fs::path(out) / "props.pctl", art.properties_text);
  std::cout << "states: " << system.states.size() << "\ntransitions: " << system.transitions.size() << "\n";
  return kOk;
}

int cmd_oracle(const std::string& path, const std::string& out, std::size_t cap) {
  auto spec = load(path);
  if (!spec) return kInvalid;
  ensure_dir(out);
  nlohmann::ordered_json doc;
  try {
    doc = oracle::oracle_ts(*spec, cap);
  } catch (const oracle::CapExceeded& e) {
    std::cerr << "masv: " << e.what() << '\n';
    return kBound;
  }
  write_file(fs::path(out) / "ts.oracle.json", dump(doc));
  std::cout << "states: " << doc["states"].size() << "\ntransitions: " << doc["transitions"].size() << "\n";
  return kOk;
}

struct RunOptions {
  std::uint64_t seed = 0;
  std::uint64_t steps = 10000;
  std::uint64_t quiesce = 3;
  std::uint64_t wall_ms = 0;
  std::string scenario;
  std::string conversions;
  std::string trace;
  std::string dispatch;
  std::string deliveries;
  bool timings = false;
};

std::unique_ptr<std::ostream> open_sink(const std::string& path) {
  if (path.empty() || path == "-") return nullptr;
  auto f = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
  if (!*f) throw IoError{"cannot write '" + path + "'"};
  return f;
}

int cmd_run(const std::string& path, const RunOptions& opt) {
  auto spec = load(path);
  if (!spec) return kInvalid;

  std::optional<sensor::Scenario> scenario;
  std::optional<sensor::ConversionTable> table;
  try {
    if (!opt.scenario.empty()) {
      if (opt.scenario == "-") scenario = sensor::Scenario::parse(std::cin);
      else scenario = sensor::Scenario::load(opt.scenario);
    }
    if (!opt.conversions.empty()) table = sensor::ConversionTable::load(opt.conversions);
  } catch (const std::invalid_argument& e) {
    std::cerr << "masv: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::runtime_error& e) {
    throw IoError{e.what()};
  }

  auto trace_file = open_sink(opt.trace);
  auto dispatch_file = open_sink(opt.dispatch);
  runtime::Sinks sinks;
  sinks.trace = trace_file.get();
  sinks.dispatch = opt.dispatch == "-" ? &std::cout : dispatch_file.get();
  sinks.timings = opt.timings;

  runtime::Limits limits;
  limits.max_steps = opt.steps;
  limits.quiesce = opt.quiesce;
  if (opt.wall_ms) limits.wall_time = std::chrono::milliseconds(opt.wall_ms);

  agent::AgentSystem sys(std::move(*spec));
  runtime::DecisionNode node(sys, opt.seed);
  runtime::Trace trace;
  std::vector<sensor::Delivery> log;
  try {
    if (scenario) {
      auto r = sensor::run_scenario(node, *scenario, table ? &*table : nullptr, limits, sinks);
      trace = std::move(r.trace);
      log = std::move(r.log);
    } else {
      trace = runtime::run_loop(node, limits, sinks);
    }
  } catch (const runtime::SinkError& e) {
    std::cerr << "masv: " << e.what() << '\n';
    return kSink;
  }
  if (trace_file) trace_file->flush();
  if (!opt.deliveries.empty()) {
    std::string text;
    for (const auto& d : log) text += sensor::to_json(d).dump() + "\n";
    write_file(opt.deliveries, text);
  }

  std::size_t commits = 0, unsafe_steps = 0, rejections = 0, violations = 0, rejected_updates = 0;
  for (const auto& r : trace.steps) {
    commits += r.committed;
    unsafe_steps += r.unsafe_only();
    for (const auto& a : r.attempts) {
      rejections += !a.verdict.safe;
      violations += a.verdict.violations.size();
    }
    if (log_level() >= 2) debug("step " + std::to_string(r.step) + (r.committed ? " committed " + r.chosen()->text : " idle"));
  }
  for (const auto& d : log) {
    rejected_updates += !d.accepted;
    if (!d.accepted) std::cerr << "masv: scenario line " << d.line << ": " << d.error << '\n';
  }
  const char* reason = trace.reason == runtime::StopReason::quiescent  ? "quiescent"
                       : trace.reason == runtime::StopReason::wall_time ? "wall-time"
                                                                        : "step-limit";
  std::ostream& summary = opt.dispatch == "-" ? std::cerr : std::cout;
  summary << "steps: " << trace.steps.size() << "\ncommits: " << commits << "\nrejections: " << rejections
          << "\nviolations: " << violations << "\nunsafe-only steps: " << unsafe_steps
          << "\nrejected updates: " << rejected_updates << "\nstop: " << reason << "\n";
  return unsafe_steps ? kUnsafe : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"masv: multi-agent decision specs to transition systems, Prism models and a runtime node"};
  app.require_subcommand(1);

  std::string spec_path, out = ".";
  ts::Bounds bounds;
  std::size_t max_depth = 0;
  std::size_t cap = oracle::kDefaultCap;
  RunOptions run;

  auto* check = app.add_subcommand("check", "parse, stratify and validate a spec");
  check->add_option("spec", spec_path, "specification file")->required();

  auto* compile = app.add_subcommand("compile", "write ts.json, model.prism and props.pctl");
  compile->add_option("spec", spec_path, "specification file")->required();
  compile->add_option("--out,-o", out, "output directory")->capture_default_str();
  compile->add_option("--max-states", bounds.max_states, "state bound")->capture_default_str()->check(CLI::PositiveNumber);
  compile->add_option("--max-depth", max_depth, "BFS depth bound (0 = unlimited)");

  auto* runc = app.add_subcommand("run", "drive the runtime decision node");
  runc->add_option("spec", spec_path, "specification file")->required();
  runc->add_option("--seed", run.seed, "RNG seed")->capture_default_str();
  runc->add_option("--steps", run.steps, "step limit")->capture_default_str();
  runc->add_option("--quiesce", run.quiesce, "idle steps before stopping (0 = never)")->capture_default_str();
  runc->add_option("--wall-ms", run.wall_ms, "wall-clock limit in milliseconds (0 = none)");
  runc->add_option("--scenario", run.scenario, "NDJSON scenario file, '-' for stdin");
  runc->add_option("--conversions", run.conversions, "conversion table for raw sensor records");
  runc->add_option("--trace", run.trace, "NDJSON trace output");
  runc->add_option("--dispatch", run.dispatch, "NDJSON action commands, '-' for stdout");
  runc->add_option("--deliveries", run.deliveries, "NDJSON scenario delivery log");
  runc->add_flag("--timings", run.timings, "include safety-check nanoseconds in the trace");

  auto* orc = app.add_subcommand("oracle", "brute-force reference system (ts.oracle.json)");
  orc->add_option("spec", spec_path, "specification file")->required();
  orc->add_option("--out,-o", out, "output directory")->capture_default_str();
  orc->add_option("--max-states", cap, "state cap")->capture_default_str()->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  if (max_depth) bounds.max_depth = max_depth;

  try {
    if (*check) return cmd_check(spec_path);
    if (*compile) return cmd_compile(spec_path, out, bounds);
    if (*runc) return cmd_run(spec_path, run);
    if (*orc) return cmd_oracle(spec_path, out, cap);
  } catch (const IoError& e) {
    std::cerr << "masv: " << e.message << '\n';
    return kIo;
  }
  return kOk;
}
