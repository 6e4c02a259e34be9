#pragma once

#include <complex>
#include <vector>

#include "etale/rational.hpp"

namespace etale {

// Element of Q(i, sqrt(3)): (a + b*sqrt3) + i*(c + d*sqrt3).
// Every matrix entry of the bundled Dirac systems, projectors and spin
// actions lives in this field, so equivariance defects can be certified
// as literal zeros instead of small floats.
struct ExactC {
  Rat a, b, c, d;

  ExactC() = default;
  ExactC(Rat re) : a(re) {}
  ExactC(Rat re, Rat im) : a(re), c(im) {}
  ExactC(Rat a_, Rat b_, Rat c_, Rat d_) : a(a_), b(b_), c(c_), d(d_) {}
  static ExactC i() { ExactC z; z.c = Rat(1); return z; }
  static ExactC sqrt3() { ExactC z; z.b = Rat(1); return z; }

  bool is_zero() const { return a.is_zero() && b.is_zero() && c.is_zero() && d.is_zero(); }

  friend ExactC operator+(const ExactC& x, const ExactC& y) {
    return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
  }
  friend ExactC operator-(const ExactC& x, const ExactC& y) {
    return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
  }
  ExactC operator-() const { return {-a, -b, -c, -d}; }

  friend ExactC operator*(const ExactC& x, const ExactC& y) {
    // (p + i q)(r + i s) with p,q,r,s in Q(sqrt3)
    auto mul = [](const Rat& u1, const Rat& u3, const Rat& v1, const Rat& v3) {
      // (u1 + u3 s3)(v1 + v3 s3) = u1 v1 + 3 u3 v3 + (u1 v3 + u3 v1) s3
      return std::pair<Rat, Rat>(u1 * v1 + Rat(3) * u3 * v3, u1 * v3 + u3 * v1);
    };
    auto [pr1, pr3] = mul(x.a, x.b, y.a, y.b);
    auto [qs1, qs3] = mul(x.c, x.d, y.c, y.d);
    auto [ps1, ps3] = mul(x.a, x.b, y.c, y.d);
    auto [qr1, qr3] = mul(x.c, x.d, y.a, y.b);
    return {pr1 - qs1, pr3 - qs3, ps1 + qr1, ps3 + qr3};
  }
  ExactC& operator+=(const ExactC& y) { *this = *this + y; return *this; }
  ExactC& operator-=(const ExactC& y) { *this = *this - y; return *this; }
  ExactC& operator*=(const ExactC& y) { *this = *this * y; return *this; }

  ExactC conj() const { return {a, b, -c, -d}; }

  ExactC inverse() const {
    // z * conj(z) = |z|^2 = u + v sqrt3 with u,v rational
    ExactC n = (*this) * conj();   // purely real in Q(sqrt3)
    Rat u = n.a, v = n.b;
    Rat denom = u * u - Rat(3) * v * v;
    if (denom.is_zero()) throw std::domain_error("ExactC: not invertible");
    // 1/(u + v s3) = (u - v s3)/denom
    ExactC inv_norm{u / denom, -v / denom, Rat(0), Rat(0)};
    return conj() * inv_norm;
  }

  friend bool operator==(const ExactC& x, const ExactC& y) {
    return x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
  }
  friend bool operator!=(const ExactC& x, const ExactC& y) { return !(x == y); }

  std::complex<double> to_complex() const {
    static const double s3 = std::sqrt(3.0);
    return {a.to_double() + b.to_double() * s3, c.to_double() + d.to_double() * s3};
  }
};

// Small dense matrix over ExactC (spinor-space sized: 1x1 or 2x2 here).
struct ExactMat {
  int n = 0;
  std::vector<ExactC> v;

  ExactMat() = default;
  explicit ExactMat(int n_) : n(n_), v(n_ * n_) {}
  static ExactMat identity(int n_) {
    ExactMat m(n_);
    for (int i = 0; i < n_; ++i) m.at(i, i) = ExactC(Rat(1));
    return m;
  }
  ExactC& at(int r, int c) { return v[r * n + c]; }
  const ExactC& at(int r, int c) const { return v[r * n + c]; }

  friend ExactMat operator*(const ExactMat& x, const ExactMat& y) {
    ExactMat z(x.n);
    for (int i = 0; i < x.n; ++i)
      for (int k = 0; k < x.n; ++k) {
        if (x.at(i, k).is_zero()) continue;
        for (int j = 0; j < x.n; ++j) z.at(i, j) += x.at(i, k) * y.at(k, j);
      }
    return z;
  }
  friend ExactMat operator+(const ExactMat& x, const ExactMat& y) {
    ExactMat z(x.n);
    for (size_t i = 0; i < z.v.size(); ++i) z.v[i] = x.v[i] + y.v[i];
    return z;
  }
  friend ExactMat operator-(const ExactMat& x, const ExactMat& y) {
    ExactMat z(x.n);
    for (size_t i = 0; i < z.v.size(); ++i) z.v[i] = x.v[i] - y.v[i];
    return z;
  }
  ExactMat operator-() const {
    ExactMat z(n);
    for (size_t i = 0; i < v.size(); ++i) z.v[i] = -v[i];
    return z;
  }
  friend ExactMat operator*(const ExactC& s, const ExactMat& y) {
    ExactMat z(y.n);
    for (size_t i = 0; i < z.v.size(); ++i) z.v[i] = s * y.v[i];
    return z;
  }
  friend bool operator==(const ExactMat& x, const ExactMat& y) {
    return x.n == y.n && x.v == y.v;
  }
  ExactMat adjoint() const {
    ExactMat z(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) z.at(i, j) = at(j, i).conj();
    return z;
  }
  bool is_zero() const {
    for (const auto& e : v) if (!e.is_zero()) return false;
    return true;
  }
};

}  // namespace etale
