#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "masv/logic/interpretation.hpp"
#include "masv/spec/validate.hpp"

namespace masv::logic {

inline constexpr std::size_t kDefaultAtomLimit = std::size_t{1} << 22;

class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bijection between the ground atoms of a validated specification and
/// dense ids. Ids are grouped by predicate (declaration order); inside a
/// predicate they follow lexicographic argument order.
class AtomIndex {
 public:
  AtomIndex() = default;

  /// Throws CapacityError when the Herbrand base exceeds `limit` atoms.
  static AtomIndex build(const spec::ValidatedSpec& spec, std::size_t limit = kDefaultAtomLimit);

  std::size_t size() const { return size_; }
  std::size_t predicate_count() const { return preds_.size(); }
  std::size_t arity(PredicateId p) const { return preds_[p].domains.size(); }
  DomainId arg_domain(PredicateId p, std::size_t pos) const { return preds_[p].domains[pos]; }
  AtomId first(PredicateId p) const { return preds_[p].base; }
  AtomId last(PredicateId p) const { return preds_[p].base + preds_[p].count; }
  std::size_t count(PredicateId p) const { return preds_[p].count; }
  const std::string& predicate_name(PredicateId p) const { return preds_[p].name; }
  const std::string& constant_name(ConstId c) const { return constants_[c]; }

  /// Position of `c` inside a domain, or -1.
  int local(DomainId d, ConstId c) const { return domain_local_[d][c]; }
  ConstId member(DomainId d, std::size_t i) const { return domain_members_[d][i]; }
  std::size_t domain_size(DomainId d) const { return domain_members_[d].size(); }
  std::uint32_t stride(PredicateId p, std::size_t pos) const { return preds_[p].stride[pos]; }

  /// Id of p(args); nullopt when an argument is outside its domain.
  std::optional<AtomId> find(PredicateId p, std::span<const ConstId> args) const;

  PredicateId predicate_of(AtomId a) const;
  ConstId arg(AtomId a, std::size_t pos) const;
  std::vector<ConstId> args(AtomId a) const;

  std::string to_string(AtomId a) const;
  std::optional<AtomId> parse(std::string_view text) const;

  /// Members rendered as atom strings, sorted lexicographically.
  std::vector<std::string> to_strings(const Interpretation& i) const;
  std::vector<std::string> to_strings(std::span<const AtomId> atoms) const;

  Interpretation empty_interpretation() const { return Interpretation(size_); }

 private:
  struct Pred {
    std::string name;
    AtomId base = 0;
    std::uint32_t count = 0;
    std::vector<DomainId> domains;
    std::vector<std::uint32_t> stride;
  };

  std::vector<Pred> preds_;
  std::vector<std::string> constants_;
  std::vector<std::vector<int>> domain_local_;
  std::vector<std::vector<ConstId>> domain_members_;
  std::size_t size_ = 0;
};

}  // namespace masv::logic
