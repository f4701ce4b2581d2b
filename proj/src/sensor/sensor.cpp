#include "masv/sensor/sensor.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace masv::sensor {

namespace {

Cmp parse_cmp(const std::string& s) {
  if (s == "<") return Cmp::lt;
  if (s == "<=") return Cmp::le;
  if (s == ">") return Cmp::gt;
  if (s == ">=") return Cmp::ge;
  if (s == "==") return Cmp::eq;
  if (s == "!=") return Cmp::ne;
  if (s == "any") return Cmp::any;
  throw std::invalid_argument("unknown comparator '" + s + "'");
}

Payload payload_of(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw std::invalid_argument("payload must be a number or a string");
}

bool matches(const ConversionRule& rule, const Payload& p) {
  if (rule.cmp == Cmp::any) return true;
  if (rule.cmp == Cmp::eq || rule.cmp == Cmp::ne) {
    bool equal = p.index() == rule.operand.index() && p == rule.operand;
    return (rule.cmp == Cmp::eq) == equal;
  }
  if (!std::holds_alternative<double>(p) || !std::holds_alternative<double>(rule.operand)) return false;
  double x = std::get<double>(p), t = std::get<double>(rule.operand);
  switch (rule.cmp) {
    case Cmp::lt: return x < t;
    case Cmp::le: return x <= t;
    case Cmp::gt: return x > t;
    case Cmp::ge: return x >= t;
    default: return false;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::string payload_text(const Payload& p) {
  if (const auto* s = std::get_if<std::string>(&p)) return *s;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(p));
  return buf;
}

ConversionTable ConversionTable::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("rules") || !j["rules"].is_array())
    throw std::invalid_argument("conversion table needs a \"rules\" array");
  ConversionTable table;
  for (std::size_t i = 0; i < j["rules"].size(); ++i) {
    const auto& rj = j["rules"][i];
    try {
      ConversionRule r;
      r.channel = rj.at("channel").get<std::string>();
      r.cmp = parse_cmp(rj.value("cmp", std::string("any")));
      if (rj.contains("threshold")) r.operand = payload_of(rj["threshold"]);
      else if (rj.contains("value")) r.operand = payload_of(rj["value"]);
      else if (r.cmp != Cmp::any) throw std::invalid_argument("comparator needs a threshold or value");
      std::string err;
      nlohmann::json probe = {{"agent", "_"},
                              {"kind", rj.value("kind", std::string("belief"))},
                              {"op", rj.at("op").get<std::string>()},
                              {"atom", rj.at("atom").get<std::string>()}};
      auto u = runtime::update_from_json(probe, &err);
      if (!u) throw std::invalid_argument(err);
      r.kind = u->kind;
      r.op = u->op;
      r.atom = u->atom;
      table.rules.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("conversion rule " + std::to_string(i) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("conversion rule " + std::to_string(i) + ": " + e.what());
    }
  }
  return table;
}

ConversionTable ConversionTable::load(const std::string& path) {
  auto text = read_file(path);
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw std::invalid_argument("'" + path + "' is not valid JSON");
  return from_json(j);
}

Processed data_processing(const RawRecord& r, const ConversionTable& table) {
  bool known = false;
  for (const auto& rule : table.rules) {
    if (rule.channel != r.channel) continue;
    known = true;
    if (!matches(rule, r.payload)) continue;
    runtime::SensorUpdate u;
    u.agent = r.agent;
    u.kind = rule.kind;
    u.op = rule.op;
    u.atom = rule.atom;
    const std::string text = payload_text(r.payload);
    for (std::size_t pos; (pos = u.atom.find("{payload}")) != std::string::npos;) u.atom.replace(pos, 9, text);
    return {std::move(u), {}};
  }
  if (!known) return {std::nullopt, "unknown channel '" + r.channel + "'"};
  return {std::nullopt, "payload " + payload_text(r.payload) + " matches no rule for channel '" + r.channel + "'"};
}

Scenario Scenario::parse(std::istream& in) {
  Scenario sc;
  std::string line;
  std::size_t lineno = 0;
  std::uint64_t last_t = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fail = [&](const std::string& msg) {
      throw std::invalid_argument("scenario line " + std::to_string(lineno) + ": " + msg);
    };
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) fail("not a JSON object");
    if (j.contains("scenario")) {
      sc.name = j["scenario"].is_string() ? j["scenario"].get<std::string>() : "";
      sc.description = j.value("description", std::string());
      continue;
    }
    if (!j.contains("t") || !j["t"].is_number_unsigned()) fail("missing non-negative integer 't'");
    ScenarioEntry e;
    e.t = j["t"].get<std::uint64_t>();
    e.line = lineno;
    if (e.t < last_t) fail("'t' decreases");
    last_t = e.t;
    if (j.contains("channel")) {
      if (!j["channel"].is_string() || !j.contains("agent") || !j["agent"].is_string() || !j.contains("payload"))
        fail("raw record needs string 'agent', string 'channel' and 'payload'");
      try {
        e.record = RawRecord{j["agent"], j["channel"], payload_of(j["payload"])};
      } catch (const std::invalid_argument& ex) {
        fail(ex.what());
      }
    } else {
      std::string err;
      auto u = runtime::update_from_json(j, &err);
      if (!u) fail(err);
      e.record = std::move(*u);
    }
    sc.entries.push_back(std::move(e));
  }
  return sc;
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return parse(in);
}

ScenarioResult run_scenario(runtime::DecisionNode& node, const Scenario& scenario, const ConversionTable* table,
                            const runtime::Limits& limits, const runtime::Sinks& sinks) {
  ScenarioResult result;
  std::size_t next = 0;
  runtime::Feeder feeder;
  feeder.before_step = [&](std::uint64_t step) {
    for (; next < scenario.entries.size() && scenario.entries[next].t <= step; ++next) {
      const auto& e = scenario.entries[next];
      Delivery d;
      d.t = e.t;
      d.step = step;
      d.line = e.line;
      std::optional<runtime::SensorUpdate> u;
      if (const auto* raw = std::get_if<RawRecord>(&e.record)) {
        if (!table) {
          d.error = "raw record without a conversion table";
        } else {
          auto p = data_processing(*raw, *table);
          u = std::move(p.update);
          d.error = std::move(p.error);
        }
      } else {
        u = std::get<runtime::SensorUpdate>(e.record);
      }
      if (u) {
        if (auto err = node.ingest(*u)) {
          d.error = *err;
        } else {
          d.accepted = true;
        }
        d.update = std::move(u);
      }
      result.log.push_back(std::move(d));
    }
  };
  feeder.pending = [&] { return next < scenario.entries.size(); };
  result.trace = runtime::run_loop(node, limits, sinks, feeder);
  return result;
}

nlohmann::ordered_json to_json(const Delivery& d) {
  nlohmann::ordered_json j;
  j["t"] = d.t;
  j["step"] = d.step;
  j["line"] = d.line;
  j["accepted"] = d.accepted;
  if (d.update) j["update"] = runtime::to_json(*d.update);
  if (!d.error.empty()) j["error"] = d.error;
  return j;
}

}  // namespace masv::sensor
