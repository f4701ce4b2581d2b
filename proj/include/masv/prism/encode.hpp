#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "masv/diagnostic.hpp"
#include "masv/ts/transition_system.hpp"

namespace masv::prism {

struct PrismArtifacts {
  std::string model_text;
  std::string properties_text;
  std::map<std::size_t, std::string> state_comments;
};

class EmptySystemError : public std::invalid_argument {
 public:
  EmptySystemError() : std::invalid_argument("transition system has no states") {}
};

/// Monolithic MDP: one module, one state variable, one command per
/// transition. Requires a labeled system.
PrismArtifacts encode_prism(const ts::TransitionSystem& ts, const agent::AgentSystem& sys);

std::string encode_properties();

/// Command label for each transition, in transition order:
/// a<agent>_<action>_<k> where k numbers the distinct ground instances of
/// that agent/action pair by first appearance; deadlock loops are loop_<s>.
std::vector<std::string> command_labels(const ts::TransitionSystem& ts, const agent::AgentSystem& sys);

/// Probability literal: exact decimal when the expansion terminates.
std::string format_probability(const Rational& p);

struct ParsedCommand {
  std::string label;
  std::size_t source = 0;
  std::vector<std::pair<double, std::size_t>> outcomes;
  std::vector<std::string> literals;  // probability text as written
};

struct ParsedModel {
  std::size_t state_count = 0;
  std::vector<ParsedCommand> commands;
  std::map<std::string, std::vector<std::size_t>> labels;
};

struct SyntaxResult {
  bool ok = false;
  ParsedModel model;
  Diagnostics diagnostics;
};

/// Validates `text` against the emitted subset (see docs/prism-subset.md)
/// and reconstructs the transition relation.
SyntaxResult check_prism_syntax(const std::string& text);

}  // namespace masv::prism
