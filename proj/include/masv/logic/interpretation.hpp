#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace masv {

using AtomId = std::uint32_t;

namespace logic {

/// A set of ground atoms over a fixed Herbrand base, stored as a dense
/// bitset. Iteration is in ascending atom-id order.
class Interpretation {
 public:
  Interpretation() = default;
  explicit Interpretation(std::size_t universe) : universe_(universe), words_((universe + 63) / 64, 0) {}

  std::size_t universe() const { return universe_; }

  bool contains(AtomId a) const { return (words_[a >> 6] >> (a & 63)) & 1U; }
  void insert(AtomId a) { words_[a >> 6] |= std::uint64_t{1} << (a & 63); }
  void erase(AtomId a) { words_[a >> 6] &= ~(std::uint64_t{1} << (a & 63)); }

  /// Inserts and reports whether the atom was new.
  bool add(AtomId a) {
    std::uint64_t& w = words_[a >> 6];
    std::uint64_t bit = std::uint64_t{1} << (a & 63);
    if (w & bit) return false;
    w |= bit;
    return true;
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }
  bool empty() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }
  void clear() { std::fill(words_.begin(), words_.end(), 0); }

  /// Calls f(id) for every member with first <= id < last.
  template <typename F>
  void for_each_in(AtomId first, AtomId last, F&& f) const {
    if (first >= last) return;
    std::size_t wi = first >> 6;
    const std::size_t wend = (static_cast<std::size_t>(last) + 63) >> 6;
    std::uint64_t w = words_[wi] & (~std::uint64_t{0} << (first & 63));
    for (;;) {
      while (w) {
        AtomId id = static_cast<AtomId>((wi << 6) + static_cast<std::size_t>(std::countr_zero(w)));
        if (id >= last) return;
        f(id);
        w &= w - 1;
      }
      if (++wi >= wend) return;
      w = words_[wi];
    }
  }

  template <typename F>
  void for_each(F&& f) const {
    for_each_in(0, static_cast<AtomId>(universe_), std::forward<F>(f));
  }

  std::vector<AtomId> atoms() const {
    std::vector<AtomId> out;
    for_each([&](AtomId a) { out.push_back(a); });
    return out;
  }

  /// Superset test.
  bool includes(const Interpretation& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (other.words_[i] & ~words_[i]) return false;
    return true;
  }

  void merge(const Interpretation& other) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  }

  std::size_t hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto w : words_) {
      h ^= w;
      h *= 1099511628211ULL;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }

  bool operator==(const Interpretation&) const = default;

 private:
  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

struct InterpretationHash {
  std::size_t operator()(const Interpretation& i) const { return i.hash(); }
};

}  // namespace logic
}  // namespace masv
