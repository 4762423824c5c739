#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "ofl/error.hpp"

namespace ofl {

// Exact rational arithmetic on 64-bit numerator/denominator with 128-bit
// intermediates. Results that do not fit after reduction raise kNumeric.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t value) : num_(value), den_(1) {}  // NOLINT: implicit by design
  Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw Error(ErrorKind::kNumeric, "rational with zero denominator");
    assign(static_cast<I128>(num), static_cast<I128>(den));
  }

  // Exact dyadic expansion of a finite double. Values whose exact form does
  // not fit in int64 (e.g. denormals) are rejected; use "p/q" strings instead.
  static Rational from_double(double value) {
    if (!std::isfinite(value)) throw Error(ErrorKind::kParse, "non-finite number");
    if (value == 0.0) return Rational(0);
    int exp = 0;
    double mantissa = std::frexp(value, &exp);
    auto scaled = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
    exp -= 53;
    while (scaled != 0 && (scaled & 1) == 0) {
      scaled >>= 1;
      ++exp;
    }
    I128 num = scaled;
    I128 den = 1;
    if (exp >= 0) {
      if (exp > 62) throw Error(ErrorKind::kParse, "number too large for exact rational");
      num <<= exp;
    } else {
      if (-exp > 62) {
        throw Error(ErrorKind::kParse,
                    "number has no compact exact rational form; pass it as a \"p/q\" string");
      }
      den <<= -exp;
    }
    Rational r;
    r.assign(num, den);
    return r;
  }

  // Accepts "p" or "p/q" with optional leading minus on p.
  static Rational parse(const std::string& text) {
    const auto slash = text.find('/');
    try {
      if (slash == std::string::npos) {
        return Rational(parse_int(text));
      }
      std::int64_t p = parse_int(text.substr(0, slash));
      std::int64_t q = parse_int(text.substr(slash + 1));
      if (q <= 0) throw Error(ErrorKind::kParse, "rational denominator must be positive: " + text);
      return Rational(p, q);
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw Error(ErrorKind::kParse, "malformed rational: " + text);
    }
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return num_ == 0; }
  bool negative() const { return num_ < 0; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  std::string str() const {
    std::string s = std::to_string(num_);
    if (den_ != 1) s += "/" + std::to_string(den_);
    return s;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    Rational r;
    r.assign(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
    return r;
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    Rational r;
    r.assign(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
    return r;
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    Rational r;
    r.assign(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    return r;
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw Error(ErrorKind::kNumeric, "rational division by zero");
    Rational r;
    r.assign(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
    return r;
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

 private:
  using I128 = __int128;
  static I128 i128(std::int64_t v) { return static_cast<I128>(v); }

  static std::int64_t parse_int(const std::string& s) {
    if (s.empty()) throw Error(ErrorKind::kParse, "empty integer");
    std::size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw Error(ErrorKind::kParse, "trailing characters in integer: " + s);
    return static_cast<std::int64_t>(v);
  }

  static I128 gcd128(I128 a, I128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      I128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  void assign(I128 num, I128 den) {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    if (num == 0) {
      num_ = 0;
      den_ = 1;
      return;
    }
    I128 g = gcd128(num, den);
    num /= g;
    den /= g;
    constexpr I128 kMax = static_cast<I128>(INT64_MAX);
    constexpr I128 kMin = static_cast<I128>(INT64_MIN);
    if (num > kMax || num < kMin || den > kMax) {
      throw Error(ErrorKind::kNumeric, "rational overflow");
    }
    num_ = static_cast<std::int64_t>(num);
    den_ = static_cast<std::int64_t>(den);
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace ofl
