#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace ufam {

/// Family cardinalities. C(64, 32) < 2^61, so every count on a 64-element
/// ground fits; arithmetic that could exceed that goes through Int128.
using Count = std::int64_t;
using Int128 = __int128;

namespace detail {

inline constexpr int kPascalRows = 65;

struct PascalTable {
  std::array<std::array<Count, kPascalRows>, kPascalRows> c{};
  constexpr PascalTable() {
    for (int n = 0; n < kPascalRows; ++n) {
      c[n][0] = 1;
      for (int k = 1; k <= n; ++k) c[n][k] = c[n - 1][k - 1] + (k < n ? c[n - 1][k] : 0);
    }
  }
};

inline constexpr PascalTable kPascal{};

}  // namespace detail

/// C(n, k) with the conventions C(n, k) = 0 for k < 0, k > n or n < 0.
inline Count binom(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0;
  if (n >= detail::kPascalRows) throw std::out_of_range("binom: n = " + std::to_string(n) + " exceeds table");
  return detail::kPascal.c[n][k];
}

inline Int128 checked_mul(Int128 a, Int128 b) {
  Int128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("128-bit multiplication overflow");
  return r;
}

inline Int128 checked_add(Int128 a, Int128 b) {
  Int128 r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("128-bit addition overflow");
  return r;
}

inline Int128 gcd128(Int128 a, Int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline std::string to_string(Int128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  std::string s;
  while (v != 0) {
    int d = static_cast<int>(v % 10);
    s.insert(s.begin(), static_cast<char>('0' + (d < 0 ? -d : d)));
    v /= 10;
  }
  return neg ? "-" + s : s;
}

/// Exact rational in lowest terms with positive denominator.
class Rational {
 public:
  Rational() = default;
  Rational(Int128 num, Int128 den = 1) : num_(num), den_(den) {
    if (den_ == 0) throw std::domain_error("rational with zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    Int128 g = gcd128(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  Int128 num() const { return num_; }
  Int128 den() const { return den_; }
  bool is_integer() const { return den_ == 1; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(checked_add(checked_mul(a.num_, b.den_), checked_mul(b.num_, a.den_)), checked_mul(a.den_, b.den_));
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(checked_mul(a.num_, b.num_), checked_mul(a.den_, b.den_));
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return Rational(checked_mul(a.num_, b.den_), checked_mul(a.den_, b.num_));
  }
  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    Int128 l = checked_mul(a.num_, b.den_);
    Int128 r = checked_mul(b.num_, a.den_);
    return l < r ? std::strong_ordering::less : (l > r ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  std::string to_string() const {
    return den_ == 1 ? ufam::to_string(num_) : ufam::to_string(num_) + "/" + ufam::to_string(den_);
  }
  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

 private:
  Int128 num_ = 0;
  Int128 den_ = 1;
};

}  // namespace ufam
