#pragma once

#include <istream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "masv/runtime/node.hpp"

namespace masv::sensor {

using Payload = std::variant<double, std::string>;

struct RawRecord {
  std::string agent;
  std::string channel;
  Payload payload;
};

enum class Cmp { lt, le, gt, ge, eq, ne, any };

/// One declarative conversion: when `channel`'s payload satisfies
/// `cmp` against the threshold (or symbolic value), emit the update.
/// `{payload}` in the atom template is replaced by the payload text.
struct ConversionRule {
  std::string channel;
  Cmp cmp = Cmp::any;
  Payload operand;
  runtime::UpdateKind kind = runtime::UpdateKind::belief;
  runtime::UpdateOp op = runtime::UpdateOp::insert;
  std::string atom;
};

struct ConversionTable {
  std::vector<ConversionRule> rules;  // first match wins

  /// Throws std::invalid_argument with the offending rule index.
  static ConversionTable from_json(const nlohmann::json& j);
  static ConversionTable load(const std::string& path);
};

struct Processed {
  std::optional<runtime::SensorUpdate> update;
  std::string error;  // set when rejected
};

/// Pure and total over the table: every record maps to an update or to a
/// rejection (unknown channel, payload outside every rule).
Processed data_processing(const RawRecord& r, const ConversionTable& table);

std::string payload_text(const Payload& p);

struct ScenarioEntry {
  std::uint64_t t = 0;  // delivered before step t (steps count from 1)
  std::size_t line = 0;
  std::variant<RawRecord, runtime::SensorUpdate> record;
};

struct Scenario {
  std::string name;
  std::string description;
  std::vector<ScenarioEntry> entries;  // t nondecreasing

  /// NDJSON: direct updates {"t","agent","kind","op","atom"}, raw records
  /// {"t","agent","channel","payload"}, optional {"scenario","description"}
  /// header. Throws std::invalid_argument naming the line.
  static Scenario parse(std::istream& in);
  static Scenario load(const std::string& path);
};

struct Delivery {
  std::uint64_t t = 0;
  std::uint64_t step = 0;
  std::size_t line = 0;
  bool accepted = false;
  std::optional<runtime::SensorUpdate> update;
  std::string error;
};

struct ScenarioResult {
  runtime::Trace trace;
  std::vector<Delivery> log;
};

/// Drives run_loop, delivering each entry before its step. Raw records
/// need a conversion table; without one they are rejected.
ScenarioResult run_scenario(runtime::DecisionNode& node, const Scenario& scenario, const ConversionTable* table,
                            const runtime::Limits& limits, const runtime::Sinks& sinks = {});

nlohmann::ordered_json to_json(const Delivery& d);

}  // namespace masv::sensor
