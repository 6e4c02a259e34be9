#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

#include "etale/rational.hpp"

namespace etale {

constexpr int kMaxDim = 3;

// Integer n x n matrix, n <= 3. Linear parts of all germs are integral
// (lattice-preserving), which keeps grid transport exact.
struct IMat {
  int n = 0;
  std::array<long long, kMaxDim * kMaxDim> v{};

  IMat() = default;
  explicit IMat(int n_) : n(n_) { v.fill(0); }
  static IMat identity(int n_) {
    IMat m(n_);
    for (int i = 0; i < n_; ++i) m.at(i, i) = 1;
    return m;
  }
  long long& at(int r, int c) { return v[r * kMaxDim + c]; }
  long long at(int r, int c) const { return v[r * kMaxDim + c]; }

  friend IMat operator*(const IMat& a, const IMat& b) {
    IMat m(a.n);
    for (int i = 0; i < a.n; ++i)
      for (int j = 0; j < a.n; ++j) {
        long long s = 0;
        for (int k = 0; k < a.n; ++k) s += a.at(i, k) * b.at(k, j);
        m.at(i, j) = s;
      }
    return m;
  }
  friend bool operator==(const IMat& a, const IMat& b) {
    if (a.n != b.n) return false;
    for (int i = 0; i < a.n; ++i)
      for (int j = 0; j < a.n; ++j)
        if (a.at(i, j) != b.at(i, j)) return false;
    return true;
  }
  long long det() const {
    if (n == 1) return at(0, 0);
    if (n == 2) return at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
    return at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
           at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
           at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
  }
  // Inverse of a unimodular matrix (det = +-1); throws otherwise.
  IMat inverse() const {
    long long d = det();
    if (d != 1 && d != -1) throw std::domain_error("IMat: not unimodular");
    IMat adj(n);
    if (n == 1) {
      adj.at(0, 0) = 1;
    } else if (n == 2) {
      adj.at(0, 0) = at(1, 1);  adj.at(0, 1) = -at(0, 1);
      adj.at(1, 0) = -at(1, 0); adj.at(1, 1) = at(0, 0);
    } else {
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          int r0 = (i + 1) % 3, r1 = (i + 2) % 3, c0 = (j + 1) % 3, c1 = (j + 2) % 3;
          adj.at(j, i) = at(r0, c0) * at(r1, c1) - at(r0, c1) * at(r1, c0);
        }
    }
    IMat inv(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) inv.at(i, j) = d * adj.at(i, j);
    return inv;
  }
  IMat transpose() const {
    IMat t(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) t.at(i, j) = at(j, i);
    return t;
  }
};

struct IVec {
  int n = 0;
  std::array<long long, kMaxDim> v{};
  IVec() = default;
  explicit IVec(int n_) : n(n_) { v.fill(0); }
  long long& operator[](int i) { return v[i]; }
  long long operator[](int i) const { return v[i]; }
  friend bool operator==(const IVec& a, const IVec& b) {
    if (a.n != b.n) return false;
    for (int i = 0; i < a.n; ++i) if (a.v[i] != b.v[i]) return false;
    return true;
  }
};

inline IVec operator*(const IMat& m, const IVec& x) {
  IVec y(m.n);
  for (int i = 0; i < m.n; ++i) {
    long long s = 0;
    for (int k = 0; k < m.n; ++k) s += m.at(i, k) * x[k];
    y[i] = s;
  }
  return y;
}

struct RatVec {
  int n = 0;
  std::array<Rat, kMaxDim> v{};
  RatVec() = default;
  explicit RatVec(int n_) : n(n_) {}
  Rat& operator[](int i) { return v[i]; }
  const Rat& operator[](int i) const { return v[i]; }
  friend RatVec operator+(const RatVec& a, const RatVec& b) {
    RatVec c(a.n);
    for (int i = 0; i < a.n; ++i) c[i] = a[i] + b[i];
    return c;
  }
  friend RatVec operator-(const RatVec& a, const RatVec& b) {
    RatVec c(a.n);
    for (int i = 0; i < a.n; ++i) c[i] = a[i] - b[i];
    return c;
  }
  friend bool operator==(const RatVec& a, const RatVec& b) {
    if (a.n != b.n) return false;
    for (int i = 0; i < a.n; ++i) if (!(a[i] == b[i])) return false;
    return true;
  }
};

inline RatVec operator*(const IMat& m, const RatVec& x) {
  RatVec y(m.n);
  for (int i = 0; i < m.n; ++i) {
    Rat s(0);
    for (int k = 0; k < m.n; ++k) s += Rat(m.at(i, k)) * x[k];
    y[i] = s;
  }
  return y;
}

struct RatMat {
  int n = 0;
  std::array<Rat, kMaxDim * kMaxDim> v{};
  RatMat() = default;
  explicit RatMat(int n_) : n(n_) {}
  static RatMat identity(int n_) {
    RatMat m(n_);
    for (int i = 0; i < n_; ++i) m.at(i, i) = Rat(1);
    return m;
  }
  Rat& at(int r, int c) { return v[r * kMaxDim + c]; }
  const Rat& at(int r, int c) const { return v[r * kMaxDim + c]; }
  friend RatMat operator+(const RatMat& a, const RatMat& b) {
    RatMat m(a.n);
    for (int i = 0; i < a.n; ++i)
      for (int j = 0; j < a.n; ++j) m.at(i, j) = a.at(i, j) + b.at(i, j);
    return m;
  }
  friend RatMat operator*(const RatMat& a, const RatMat& b) {
    RatMat m(a.n);
    for (int i = 0; i < a.n; ++i)
      for (int j = 0; j < a.n; ++j) {
        Rat s(0);
        for (int k = 0; k < a.n; ++k) s += a.at(i, k) * b.at(k, j);
        m.at(i, j) = s;
      }
    return m;
  }
  friend RatMat operator*(const Rat& s, const RatMat& b) {
    RatMat m(b.n);
    for (int i = 0; i < b.n; ++i)
      for (int j = 0; j < b.n; ++j) m.at(i, j) = s * b.at(i, j);
    return m;
  }
  friend bool operator==(const RatMat& a, const RatMat& b) {
    if (a.n != b.n) return false;
    for (int i = 0; i < a.n; ++i)
      for (int j = 0; j < a.n; ++j) if (!(a.at(i, j) == b.at(i, j))) return false;
    return true;
  }
  RatMat transpose() const {
    RatMat t(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) t.at(i, j) = at(j, i);
    return t;
  }
  Rat det() const {
    if (n == 1) return at(0, 0);
    if (n == 2) return at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
    return at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
           at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
           at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
  }
  RatMat inverse() const {
    Rat d = det();
    if (d.is_zero()) throw std::domain_error("RatMat: singular");
    RatMat inv(n);
    if (n == 1) {
      inv.at(0, 0) = Rat(1) / d;
    } else if (n == 2) {
      inv.at(0, 0) = at(1, 1) / d;  inv.at(0, 1) = -at(0, 1) / d;
      inv.at(1, 0) = -at(1, 0) / d; inv.at(1, 1) = at(0, 0) / d;
    } else {
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          int r0 = (i + 1) % 3, r1 = (i + 2) % 3, c0 = (j + 1) % 3, c1 = (j + 2) % 3;
          inv.at(j, i) = (at(r0, c0) * at(r1, c1) - at(r0, c1) * at(r1, c0)) / d;
        }
    }
    return inv;
  }
};

inline RatMat to_rat(const IMat& m) {
  RatMat r(m.n);
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) r.at(i, j) = Rat(m.at(i, j));
  return r;
}

inline RatVec operator*(const RatMat& m, const RatVec& x) {
  RatVec y(m.n);
  for (int i = 0; i < m.n; ++i) {
    Rat s(0);
    for (int k = 0; k < m.n; ++k) s += m.at(i, k) * x[k];
    y[i] = s;
  }
  return y;
}

}  // namespace etale
