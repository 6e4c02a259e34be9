#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace etale::gf2 {

// Dense GF(2) row (bit-packed).
struct BitRow {
  std::vector<uint64_t> w;
  explicit BitRow(int ncols = 0) : w((ncols + 63) / 64, 0) {}
  void set(int j) { w[j / 64] |= uint64_t(1) << (j % 64); }
  bool get(int j) const { return (w[j / 64] >> (j % 64)) & 1; }
  void operator^=(const BitRow& o) {
    for (size_t i = 0; i < w.size(); ++i) w[i] ^= o.w[i];
  }
  bool any() const {
    for (uint64_t x : w) if (x) return true;
    return false;
  }
  int first_set(int ncols) const {
    for (size_t i = 0; i < w.size(); ++i)
      if (w[i]) {
        int j = int(i * 64 + __builtin_ctzll(w[i]));
        return j < ncols ? j : -1;
      }
    return -1;
  }
};

// Outcome of solving A x = b over GF(2).
//  - solvable: witness = one solution (free variables zeroed)
//  - infeasible: certificate = indices of original rows whose XOR gives the
//    contradiction 0 = 1 (re-checkable by direct summation)
struct Gf2Result {
  bool solvable = false;
  std::vector<uint8_t> witness;
  std::vector<int> certificate;
  int rank = 0;
  int ncols = 0;
};

class Gf2System {
public:
  explicit Gf2System(int ncols) : ncols_(ncols) {}

  void add_row(const std::vector<int>& cols, bool rhs) {
    BitRow r(ncols_);
    for (int c : cols) {
      // duplicated columns cancel over GF(2)
      if (r.get(c)) r.w[c / 64] ^= uint64_t(1) << (c % 64);
      else r.set(c);
    }
    rows_.push_back(std::move(r));
    rhs_.push_back(rhs);
  }

  int num_rows() const { return static_cast<int>(rows_.size()); }
  int num_cols() const { return ncols_; }

  Gf2Result solve() const;

  // Brute force over all assignments; valid for <= 20 unknowns. Used as the
  // independent oracle for obstruction verdicts.
  std::optional<std::vector<uint8_t>> exhaustive_solve() const;

  // Replays a candidate solution against every row.
  bool check(const std::vector<uint8_t>& x) const;
  // Replays an infeasibility certificate: XOR of the cited rows must be the
  // zero row with rhs 1.
  bool check_certificate(const std::vector<int>& cert) const;

  // Basis of the kernel {x : A x = 0}.
  std::vector<std::vector<uint8_t>> kernel_basis() const;

private:
  int ncols_;
  std::vector<BitRow> rows_;
  std::vector<uint8_t> rhs_;
};

// Solves A x = b over Z/M (M <= 64ish) by fraction-free elimination with
// Bezout row operations; used for the phase-corrected (projective) lifts.
struct ModSystem {
  int ncols;
  int modulus;
  std::vector<std::vector<int>> rows;  // dense coefficient rows
  std::vector<int> rhs;

  ModSystem(int ncols_, int modulus_) : ncols(ncols_), modulus(modulus_) {}
  void add_row(const std::vector<std::pair<int, int>>& entries, int b);
  std::optional<std::vector<int>> solve() const;
  bool check(const std::vector<int>& x) const;
};

}  // namespace etale::gf2
