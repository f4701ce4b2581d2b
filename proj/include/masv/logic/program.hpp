#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "masv/logic/atom_index.hpp"
#include "masv/spec/validate.hpp"

namespace masv::logic {

inline constexpr ConstId kUnbound = std::numeric_limits<ConstId>::max();

/// A term in a compiled pattern: either a constant or a variable slot of
/// the enclosing clause.
struct TermRef {
  bool variable = false;
  std::uint32_t value = 0;

  static TermRef constant(ConstId c) { return {false, c}; }
  static TermRef slot(std::uint32_t s) { return {true, s}; }
};

struct PatternAtom {
  PredicateId predicate = 0;
  std::vector<TermRef> args;
};

struct PatternLiteral {
  bool negated = false;
  PatternAtom atom;
};

/// Conjunction of literals over `variables.size()` slots. Slot order is
/// first-occurrence order, which fixes the solution ordering.
struct Conjunction {
  std::vector<PatternLiteral> literals;
  std::vector<std::string> variables;
  std::vector<DomainId> domains;
};

using Binding = std::vector<ConstId>;

/// A solution of a conjunctive query: variable → constant, listed in the
/// conjunction's slot order.
struct Substitution {
  std::vector<std::pair<std::string, ConstId>> bindings;

  std::optional<ConstId> get(std::string_view var) const {
    for (const auto& [v, c] : bindings)
      if (v == var) return c;
    return std::nullopt;
  }
  bool operator==(const Substitution&) const = default;
};

struct GroundLiteral {
  bool negated = false;
  AtomId atom = 0;
};

class UnboundNegationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CompiledRule {
  PatternAtom head;
  Conjunction body;
  int stratum = 0;
};

/// Knowledge rules grouped for stratum-by-stratum evaluation.
struct LogicProgram {
  std::vector<CompiledRule> rules;  // source order
  std::vector<int> predicate_strata;
  int strata = 1;
};

/// Translates an AST atom against a clause's typing.
PatternAtom compile_atom(const spec::Atom& atom, const spec::ScopeTyping& scope,
                         const spec::ValidatedSpec& spec);

/// Compiles the knowledge base of a validated specification.
LogicProgram compile_program(const spec::ValidatedSpec& spec);

/// Builds an ad-hoc query. Variable domains are taken from the predicate
/// argument positions where each variable first occurs.
Conjunction make_conjunction(const std::vector<spec::Literal>& literals, const spec::ValidatedSpec& spec);

/// Grounds an atom under a complete binding.
AtomId ground(const PatternAtom& atom, const Binding& binding, const AtomIndex& index);

}  // namespace masv::logic
