#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "masv/diagnostic.hpp"
#include "masv/spec/ast.hpp"
#include "masv/spec/stratify.hpp"

namespace masv {

using ConstId = std::uint32_t;
using DomainId = std::uint32_t;
using PredicateId = std::uint32_t;

namespace spec {

struct DomainInfo {
  std::string name;
  std::vector<ConstId> members;  // ascending
  std::vector<bool> contains;    // indexed by ConstId
};

struct PredicateInfo {
  std::string name;
  std::vector<DomainId> arg_domains;
  int stratum = 0;
};

/// Variables of one clause (rule, action, condition, constraint) in
/// first-occurrence order with their resolved domains.
struct ScopeTyping {
  std::vector<std::string> variables;
  std::vector<DomainId> domains;

  std::optional<std::size_t> slot(const std::string& var) const;
};

/// A specification that passed parsing, stratification and every
/// well-formedness check, annotated with resolved typing.
struct ValidatedSpec {
  SpecAst ast;
  StrataAssignment strata;

  std::vector<std::string> constants;  // sorted by name; index = ConstId
  std::vector<DomainInfo> domains;     // declaration order
  std::vector<PredicateInfo> predicates;

  std::vector<ScopeTyping> knowledge_scopes;
  std::vector<ScopeTyping> action_scopes;  // parameters occupy the first slots
  std::vector<std::vector<DomainId>> action_param_domains;
  std::vector<ScopeTyping> rule_scopes;
  std::vector<ScopeTyping> send_scopes;
  std::vector<ScopeTyping> receive_scopes;
  std::vector<ScopeTyping> safety_scopes;

  std::optional<ConstId> constant_id(std::string_view name) const;
  std::optional<PredicateId> predicate_id(std::string_view name) const;
  std::optional<DomainId> domain_id(std::string_view name) const;
  std::optional<std::size_t> action_index(std::string_view name) const;
  std::optional<std::size_t> agent_index(std::string_view name) const;
  std::size_t agent_count() const { return ast.agents.size(); }
};

struct ValidationResult {
  std::optional<ValidatedSpec> spec;
  Diagnostics diagnostics;

  explicit operator bool() const { return spec.has_value(); }
};

/// Resolves typing and checks every structural invariant: declared
/// constants, consistent arities, range restriction, bound effect
/// variables, exact outcome weights, known safety predicates.
ValidationResult check_well_formed(SpecAst ast, StrataAssignment strata);

/// parse_spec + check_stratification + check_well_formed.
struct LoadResult {
  std::optional<ValidatedSpec> spec;
  Diagnostics diagnostics;
  std::optional<CycleError> cycle;

  explicit operator bool() const { return spec.has_value(); }
};

LoadResult load_spec(std::string_view source);

}  // namespace spec
}  // namespace masv
