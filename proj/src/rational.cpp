#include "masv/rational.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

namespace masv {

namespace {

std::int64_t checked(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("rational overflow");
  return static_cast<std::int64_t>(v);
}

Rational make(__int128 num, __int128 den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  __int128 a = num < 0 ? -num : num;
  __int128 b = den;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  return Rational(checked(num), checked(den));
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
  if (den_ == 0) throw std::domain_error("rational with zero denominator");
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  std::int64_t g = std::gcd(num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
}

std::optional<Rational> Rational::parse_decimal(std::string_view text) {
  if (text.empty()) return std::nullopt;
  __int128 num = 0;
  __int128 den = 1;
  bool seen_dot = false;
  bool seen_digit = false;
  for (char c : text) {
    if (c == '.') {
      if (seen_dot) return std::nullopt;
      seen_dot = true;
      continue;
    }
    if (c < '0' || c > '9') return std::nullopt;
    seen_digit = true;
    num = num * 10 + (c - '0');
    if (seen_dot) den *= 10;
    if (num > INT64_MAX || den > INT64_MAX) return std::nullopt;
  }
  if (!seen_digit || text.back() == '.' || text.front() == '.') return std::nullopt;
  return make(num, den);
}

bool Rational::has_terminating_decimal() const {
  std::int64_t d = den_;
  while (d % 2 == 0) d /= 2;
  while (d % 5 == 0) d /= 5;
  return d == 1;
}

std::string Rational::to_decimal(int digits) const {
  if (has_terminating_decimal()) {
    std::string sign = num_ < 0 ? "-" : "";
    __int128 n = num_ < 0 ? -static_cast<__int128>(num_) : num_;
    __int128 whole = n / den_;
    __int128 rem = n % den_;
    std::string out = sign + std::to_string(static_cast<long long>(whole)) + ".";
    if (rem == 0) return out + "0";
    while (rem != 0) {
      rem *= 10;
      out.push_back(static_cast<char>('0' + static_cast<int>(rem / den_)));
      rem %= den_;
    }
    return out;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, to_double());
  return buf;
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::optional<Rational> Rational::parse_fraction(std::string_view text) {
  auto parse_int = [](std::string_view s) -> std::optional<std::int64_t> {
    if (s.empty()) return std::nullopt;
    bool neg = s.front() == '-';
    if (neg) s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    __int128 v = 0;
    for (char c : s) {
      if (c < '0' || c > '9') return std::nullopt;
      v = v * 10 + (c - '0');
      if (v > INT64_MAX) return std::nullopt;
    }
    return static_cast<std::int64_t>(neg ? -v : v);
  };
  auto slash = text.find('/');
  auto n = parse_int(text.substr(0, slash));
  if (!n) return std::nullopt;
  if (slash == std::string_view::npos) return Rational(*n);
  auto d = parse_int(text.substr(slash + 1));
  if (!d || *d == 0) return std::nullopt;
  return Rational(*n, *d);
}

Rational Rational::operator+(const Rational& o) const {
  return make(static_cast<__int128>(num_) * o.den_ + static_cast<__int128>(o.num_) * den_,
              static_cast<__int128>(den_) * o.den_);
}

Rational Rational::operator-(const Rational& o) const {
  return make(static_cast<__int128>(num_) * o.den_ - static_cast<__int128>(o.num_) * den_,
              static_cast<__int128>(den_) * o.den_);
}

Rational Rational::operator*(const Rational& o) const {
  return make(static_cast<__int128>(num_) * o.num_, static_cast<__int128>(den_) * o.den_);
}

std::strong_ordering Rational::operator<=>(const Rational& o) const {
  __int128 lhs = static_cast<__int128>(num_) * o.den_;
  __int128 rhs = static_cast<__int128>(o.num_) * den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace masv
