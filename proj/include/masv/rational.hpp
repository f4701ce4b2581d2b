#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace masv {

/// Exact fraction with 64-bit numerator/denominator, always kept in lowest
/// terms with a positive denominator. Arithmetic throws std::overflow_error
/// rather than silently wrapping.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  /// Parses "3", "0.25", "1.0". Returns nullopt on malformed input or
  /// when the value does not fit.
  static std::optional<Rational> parse_decimal(std::string_view text);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// True when the value has a finite decimal expansion (denominator 2^a 5^b).
  bool has_terminating_decimal() const;

  /// Exact decimal text for terminating values ("0.9", "1.0"); otherwise
  /// the closest decimal with `digits` significant digits.
  std::string to_decimal(int digits = 17) const;

  /// "num/den", or "num" when the denominator is 1.
  std::string to_string() const;

  /// Inverse of to_string().
  static std::optional<Rational> parse_fraction(std::string_view text);

  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational& operator+=(const Rational& o) { return *this = *this + o; }

  bool operator==(const Rational&) const = default;
  std::strong_ordering operator<=>(const Rational& o) const;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace masv
