#pragma once

#include <span>
#include <vector>

#include "masv/logic/atom_index.hpp"
#include "masv/logic/interpretation.hpp"
#include "masv/logic/program.hpp"

namespace masv::logic {

/// Backtracking join of a conjunction. Positive literal i is matched
/// against `*positive[i]` (or `fallback` when null); negated literals are
/// tested against `negative` once their variables are bound. `first` names
/// a positive literal to match before the others (-1 for source order).
/// `on_solution` receives the binding and returns false to stop.
class Joiner {
 public:
  Joiner(const AtomIndex& index, const std::vector<std::vector<bool>>& domain_contains)
      : index_(index), contains_(domain_contains) {}

  template <typename F>
  void run(const Conjunction& conj, std::span<const Interpretation* const> positive,
           const Interpretation& fallback, const Interpretation& negative, Binding& binding,
           int first, F&& on_solution) const;

 private:
  template <typename F>
  bool step(const Conjunction& conj, const std::vector<std::size_t>& order, std::size_t depth,
            std::span<const Interpretation* const> positive, const Interpretation& fallback,
            const Interpretation& negative, Binding& binding, F& on_solution) const;

  const AtomIndex& index_;
  const std::vector<std::vector<bool>>& contains_;
};

/// Domain membership tables (domain → ConstId → bool) for a spec.
std::vector<std::vector<bool>> domain_tables(const spec::ValidatedSpec& spec);

/// Perfect model of `facts` under a stratified program, computed stratum
/// by stratum with semi-naive (delta-driven) iteration.
Interpretation minimal_model(const Interpretation& facts, const LogicProgram& program,
                             const AtomIndex& index, const std::vector<std::vector<bool>>& domains);

/// All substitutions satisfying `conj` in `interp`, sorted
/// lexicographically by bound constants in slot order. Throws
/// UnboundNegationError if a negated literal has a variable that no
/// positive literal binds.
std::vector<Substitution> query(const Interpretation& interp, const Conjunction& conj,
                                const AtomIndex& index, const std::vector<std::vector<bool>>& domains);

/// True iff every positive atom is in `interp` and no negated one is.
inline bool holds(const Interpretation& interp, std::span<const GroundLiteral> literals) {
  for (const auto& l : literals)
    if (interp.contains(l.atom) == l.negated) return false;
  return true;
}

// --- implementation -------------------------------------------------------

template <typename F>
void Joiner::run(const Conjunction& conj, std::span<const Interpretation* const> positive,
                 const Interpretation& fallback, const Interpretation& negative, Binding& binding,
                 int first, F&& on_solution) const {
  std::vector<std::size_t> order;
  if (first >= 0) order.push_back(static_cast<std::size_t>(first));
  for (std::size_t i = 0; i < conj.literals.size(); ++i)
    if (!conj.literals[i].negated && static_cast<int>(i) != first) order.push_back(i);
  for (std::size_t i = 0; i < conj.literals.size(); ++i)
    if (conj.literals[i].negated) order.push_back(i);
  step(conj, order, 0, positive, fallback, negative, binding, on_solution);
}

template <typename F>
bool Joiner::step(const Conjunction& conj, const std::vector<std::size_t>& order, std::size_t depth,
                  std::span<const Interpretation* const> positive, const Interpretation& fallback,
                  const Interpretation& negative, Binding& binding, F& on_solution) const {
  if (depth == order.size()) return on_solution(static_cast<const Binding&>(binding));
  const std::size_t li = order[depth];
  const PatternLiteral& lit = conj.literals[li];
  const PatternAtom& pat = lit.atom;
  const std::size_t arity = pat.args.size();

  auto value_of = [&](const TermRef& t) { return t.variable ? binding[t.value] : t.value; };

  if (lit.negated) {
    ConstId a[16];
    for (std::size_t i = 0; i < arity; ++i) a[i] = value_of(pat.args[i]);
    auto id = index_.find(pat.predicate, std::span<const ConstId>(a, arity));
    if (id && negative.contains(*id)) return true;
    return step(conj, order, depth + 1, positive, fallback, negative, binding, on_solution);
  }

  const Interpretation& source =
      (li < positive.size() && positive[li] != nullptr) ? *positive[li] : fallback;

  // Leading bound arguments pin a contiguous id range.
  AtomId lo = index_.first(pat.predicate);
  std::size_t prefix = 0;
  for (; prefix < arity; ++prefix) {
    ConstId v = value_of(pat.args[prefix]);
    if (v == kUnbound) break;
    int l = index_.local(index_.arg_domain(pat.predicate, prefix), v);
    if (l < 0) return true;
    lo += static_cast<AtomId>(l) * index_.stride(pat.predicate, prefix);
  }
  if (prefix == arity) {
    if (!source.contains(lo)) return true;
    return step(conj, order, depth + 1, positive, fallback, negative, binding, on_solution);
  }
  const AtomId hi = prefix == 0 ? index_.last(pat.predicate)
                                : lo + index_.stride(pat.predicate, prefix - 1);

  // validation caps predicate arity at 16
  bool keep_going = true;
  std::uint32_t newly[16];
  source.for_each_in(lo, hi, [&](AtomId id) {
    if (!keep_going) return;
    std::uint32_t offset = id - index_.first(pat.predicate);
    std::size_t nbound = 0;
    bool ok = true;
    for (std::size_t i = prefix; i < arity && ok; ++i) {
      DomainId d = index_.arg_domain(pat.predicate, i);
      ConstId c = index_.member(d, (offset / index_.stride(pat.predicate, i)) % index_.domain_size(d));
      const TermRef& t = pat.args[i];
      if (!t.variable) {
        ok = t.value == c;
      } else if (binding[t.value] == kUnbound) {
        if (!contains_[conj.domains[t.value]][c]) {
          ok = false;
        } else {
          binding[t.value] = c;
          newly[nbound++] = t.value;
        }
      } else {
        ok = binding[t.value] == c;
      }
    }
    if (ok) keep_going = step(conj, order, depth + 1, positive, fallback, negative, binding, on_solution);
    for (std::size_t k = 0; k < nbound; ++k) binding[newly[k]] = kUnbound;
  });
  return keep_going;
}

}  // namespace masv::logic
