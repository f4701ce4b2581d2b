#pragma once

#include <set>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "masv/spec/validate.hpp"

// Brute-force reference for the transition-system generator. It shares
// only the parser and the typing tables with the main path: atoms are
// strings, models are std::set, fixpoints are naive, every substitution is
// enumerated, and nothing is cached.
namespace masv::oracle {

class CapExceeded : public std::runtime_error {
 public:
  CapExceeded(std::size_t cap, std::size_t transitions)
      : std::runtime_error("oracle state cap of " + std::to_string(cap) + " exceeded (" +
                           std::to_string(transitions) + " transitions built)"),
        cap_(cap),
        transitions_(transitions) {}
  std::size_t cap() const { return cap_; }
  std::size_t transitions() const { return transitions_; }

 private:
  std::size_t cap_;
  std::size_t transitions_;
};

inline constexpr std::size_t kDefaultCap = 2000;

/// Knowledge closure of `facts`, recomputed from scratch.
std::set<std::string> naive_closure(const spec::ValidatedSpec& spec, const std::set<std::string>& facts);

/// Labeled system in the ts.json document format.
nlohmann::ordered_json oracle_ts(const spec::ValidatedSpec& spec, std::size_t cap = kDefaultCap);

}  // namespace masv::oracle
