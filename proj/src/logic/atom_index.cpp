#include "masv/logic/atom_index.hpp"

#include <algorithm>

#include "masv/spec/parser.hpp"

namespace masv::logic {

AtomIndex AtomIndex::build(const spec::ValidatedSpec& spec, std::size_t limit) {
  AtomIndex idx;
  idx.constants_ = spec.constants;
  for (const auto& d : spec.domains) {
    std::vector<int> local(spec.constants.size(), -1);
    for (std::size_t i = 0; i < d.members.size(); ++i) local[d.members[i]] = static_cast<int>(i);
    idx.domain_local_.push_back(std::move(local));
    idx.domain_members_.push_back(d.members);
  }
  std::size_t total = 0;
  for (const auto& p : spec.predicates) {
    Pred pred;
    pred.name = p.name;
    pred.domains = p.arg_domains;
    pred.base = static_cast<AtomId>(total);
    pred.stride.assign(p.arg_domains.size(), 1);
    std::size_t count = 1;
    for (std::size_t i = p.arg_domains.size(); i-- > 0;) {
      pred.stride[i] = static_cast<std::uint32_t>(count);
      count *= spec.domains[p.arg_domains[i]].members.size();
      if (count > limit) break;
    }
    total += count;
    if (total > limit) {
      throw CapacityError("Herbrand base exceeds the limit of " + std::to_string(limit) +
                          " atoms (at predicate '" + p.name + "')");
    }
    pred.count = static_cast<std::uint32_t>(count);
    idx.preds_.push_back(std::move(pred));
  }
  idx.size_ = total;
  return idx;
}

std::optional<AtomId> AtomIndex::find(PredicateId p, std::span<const ConstId> args) const {
  const Pred& pred = preds_[p];
  if (args.size() != pred.domains.size()) return std::nullopt;
  AtomId id = pred.base;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] >= constants_.size()) return std::nullopt;
    int l = domain_local_[pred.domains[i]][args[i]];
    if (l < 0) return std::nullopt;
    id += static_cast<AtomId>(l) * pred.stride[i];
  }
  return id;
}

PredicateId AtomIndex::predicate_of(AtomId a) const {
  auto it = std::upper_bound(preds_.begin(), preds_.end(), a,
                             [](AtomId v, const Pred& p) { return v < p.base; });
  // zero-count predicates share a base with their successor; skip them
  auto p = static_cast<PredicateId>(it - preds_.begin() - 1);
  while (preds_[p].count == 0) --p;
  return p;
}

ConstId AtomIndex::arg(AtomId a, std::size_t pos) const {
  const Pred& pred = preds_[predicate_of(a)];
  std::uint32_t offset = a - pred.base;
  std::uint32_t local = (offset / pred.stride[pos]) %
                        static_cast<std::uint32_t>(domain_members_[pred.domains[pos]].size());
  return domain_members_[pred.domains[pos]][local];
}

std::vector<ConstId> AtomIndex::args(AtomId a) const {
  const Pred& pred = preds_[predicate_of(a)];
  std::vector<ConstId> out(pred.domains.size());
  std::uint32_t offset = a - pred.base;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& members = domain_members_[pred.domains[i]];
    out[i] = members[(offset / pred.stride[i]) % members.size()];
  }
  return out;
}

std::string AtomIndex::to_string(AtomId a) const {
  PredicateId p = predicate_of(a);
  std::string out = preds_[p].name;
  if (preds_[p].domains.empty()) return out;
  out += "(";
  auto as = args(a);
  for (std::size_t i = 0; i < as.size(); ++i) {
    if (i) out += ",";
    out += constants_[as[i]];
  }
  return out + ")";
}

std::optional<AtomId> AtomIndex::parse(std::string_view text) const {
  auto atom = spec::parse_atom(text);
  if (!atom || !atom->is_ground()) return std::nullopt;
  auto pit = std::find_if(preds_.begin(), preds_.end(), [&](const Pred& p) { return p.name == atom->predicate; });
  if (pit == preds_.end()) return std::nullopt;
  std::vector<ConstId> args;
  for (const auto& t : atom->args) {
    auto c = std::lower_bound(constants_.begin(), constants_.end(), t.name);
    if (c == constants_.end() || *c != t.name) return std::nullopt;
    args.push_back(static_cast<ConstId>(c - constants_.begin()));
  }
  return find(static_cast<PredicateId>(pit - preds_.begin()), args);
}

std::vector<std::string> AtomIndex::to_strings(const Interpretation& i) const {
  std::vector<std::string> out;
  i.for_each([&](AtomId a) { out.push_back(to_string(a)); });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> AtomIndex::to_strings(std::span<const AtomId> atoms) const {
  std::vector<std::string> out;
  for (AtomId a : atoms) out.push_back(to_string(a));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace masv::logic
