#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace etale {

// Exact rational scalar on int64 with 128-bit intermediates. All groupoid
// combinatorics (germs, cutoffs, metrics, GF(2) obstruction data) run on
// this type; floating point enters only in the spectral modules.
class Rat {
public:
  Rat() : num_(0), den_(1) {}
  Rat(long long n) : num_(n), den_(1) {}
  Rat(long long n, long long d) : num_(n), den_(d) { normalize(); }

  long long num() const { return num_; }
  long long den() const { return den_; }

  static Rat from_i128(__int128 n, __int128 d) {
    if (d == 0) throw std::domain_error("Rat: zero denominator");
    if (d < 0) { n = -n; d = -d; }
    __int128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
      throw std::overflow_error("Rat: overflow");
    Rat r;
    r.num_ = static_cast<long long>(n);
    r.den_ = static_cast<long long>(d);
    return r;
  }

  friend Rat operator+(const Rat& a, const Rat& b) {
    return from_i128((__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_,
                     (__int128)a.den_ * b.den_);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    return from_i128((__int128)a.num_ * b.den_ - (__int128)b.num_ * a.den_,
                     (__int128)a.den_ * b.den_);
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return from_i128((__int128)a.num_ * b.num_, (__int128)a.den_ * b.den_);
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num_ == 0) throw std::domain_error("Rat: division by zero");
    return from_i128((__int128)a.num_ * b.den_, (__int128)a.den_ * b.num_);
  }
  Rat operator-() const { Rat r(*this); r.num_ = -r.num_; return r; }
  Rat& operator+=(const Rat& b) { *this = *this + b; return *this; }
  Rat& operator-=(const Rat& b) { *this = *this - b; return *this; }
  Rat& operator*=(const Rat& b) { *this = *this * b; return *this; }
  Rat& operator/=(const Rat& b) { *this = *this / b; return *this; }

  friend bool operator==(const Rat& a, const Rat& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
  friend bool operator<(const Rat& a, const Rat& b) {
    return (__int128)a.num_ * b.den_ < (__int128)b.num_ * a.den_;
  }
  friend bool operator<=(const Rat& a, const Rat& b) { return a < b || a == b; }
  friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
  friend bool operator>=(const Rat& a, const Rat& b) { return b <= a; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  // Fractional part in [0,1).
  Rat mod1() const {
    long long r = num_ % den_;
    if (r < 0) r += den_;
    return Rat(r, den_);
  }
  // Largest integer <= value.
  long long floor() const {
    long long q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

private:
  void normalize() {
    if (den_ == 0) throw std::domain_error("Rat: zero denominator");
    if (den_ < 0) { num_ = -num_; den_ = -den_; }
    long long g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) { num_ /= g; den_ /= g; }
  }
  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) { __int128 t = a % b; a = b; b = t; }
    return a == 0 ? 1 : a;
  }

  long long num_;
  long long den_;
};

inline Rat abs(const Rat& a) { return a.num() < 0 ? -a : a; }

// Exact square root within {q, q*sqrt(3)} when one exists; used by the
// Cholesky gauge so bundled lattices stay in the exact coefficient field.
struct RatSqrt {
  bool ok = false;
  Rat rational;   // valid when sqrt3_part is false
  Rat coeff;      // value = coeff * sqrt(3) when sqrt3_part
  bool sqrt3_part = false;
};

inline bool exact_sqrt_ll(long long v, long long& out) {
  if (v < 0) return false;
  long long r = static_cast<long long>(std::sqrt(static_cast<double>(v)));
  for (long long c = r > 1 ? r - 1 : 0; c <= r + 1; ++c)
    if (c * c == v) { out = c; return true; }
  return false;
}

inline RatSqrt exact_sqrt(const Rat& v) {
  RatSqrt s;
  if (v < Rat(0)) return s;
  long long a, b;
  if (exact_sqrt_ll(v.num(), a) && exact_sqrt_ll(v.den(), b)) {
    s.ok = true;
    s.rational = Rat(a, b);
    return s;
  }
  // v = 3 q^2 ?
  Rat q2 = v / Rat(3);
  if (exact_sqrt_ll(q2.num(), a) && exact_sqrt_ll(q2.den(), b)) {
    s.ok = true;
    s.sqrt3_part = true;
    s.coeff = Rat(a, b);
    return s;
  }
  return s;
}

}  // namespace etale
