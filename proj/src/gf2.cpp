#include "etale/gf2.hpp"

#include <numeric>

namespace etale::gf2 {

Gf2Result Gf2System::solve() const {
  Gf2Result res;
  res.ncols = ncols_;
  const int m = num_rows();

  // Work rows carry provenance: combo[i] = set of original rows XORed in.
  std::vector<BitRow> a = rows_;
  std::vector<uint8_t> b = rhs_;
  std::vector<BitRow> combo;
  combo.reserve(m);
  for (int i = 0; i < m; ++i) {
    BitRow c(m);
    c.set(i);
    combo.push_back(std::move(c));
  }

  std::vector<int> pivot_row_of_col(ncols_, -1);
  int rank = 0;
  for (int i = 0; i < m; ++i) {
    // Reduce row i by existing pivots.
    for (;;) {
      int j = a[i].first_set(ncols_);
      if (j < 0) break;
      int p = pivot_row_of_col[j];
      if (p < 0) break;
      a[i] ^= a[p];
      b[i] = b[i] ^ b[p];
      combo[i] ^= combo[p];
    }
    int j = a[i].first_set(ncols_);
    if (j < 0) {
      if (b[i]) {
        // 0 = 1 contradiction; emit certificate.
        for (int r = 0; r < m; ++r)
          if (combo[i].get(r)) res.certificate.push_back(r);
        res.solvable = false;
        res.rank = rank;
        return res;
      }
      continue;
    }
    pivot_row_of_col[j] = i;
    ++rank;
  }

  // Back-substitute with free variables set to zero.
  res.solvable = true;
  res.rank = rank;
  res.witness.assign(ncols_, 0);
  // Process pivot columns from high to low so each pivot row's other set bits
  // are already resolved.
  for (int j = ncols_ - 1; j >= 0; --j) {
    int p = pivot_row_of_col[j];
    if (p < 0) continue;
    uint8_t val = b[p];
    // row p: x_j + sum_{k>j set} x_k = b[p]
    for (int k = j + 1; k < ncols_; ++k)
      if (a[p].get(k)) val ^= res.witness[k];
    res.witness[j] = val;
  }
  return res;
}

std::optional<std::vector<uint8_t>> Gf2System::exhaustive_solve() const {
  if (ncols_ > 20) return std::nullopt;
  const uint32_t lim = uint32_t(1) << ncols_;
  for (uint32_t mask = 0; mask < lim; ++mask) {
    std::vector<uint8_t> x(ncols_);
    for (int j = 0; j < ncols_; ++j) x[j] = (mask >> j) & 1;
    if (check(x)) return x;
  }
  return std::nullopt;
}

bool Gf2System::check(const std::vector<uint8_t>& x) const {
  for (int i = 0; i < num_rows(); ++i) {
    uint8_t s = 0;
    for (int j = 0; j < ncols_; ++j)
      if (rows_[i].get(j)) s ^= x[j];
    if (s != rhs_[i]) return false;
  }
  return true;
}

bool Gf2System::check_certificate(const std::vector<int>& cert) const {
  if (cert.empty()) return false;
  BitRow acc(ncols_);
  uint8_t b = 0;
  for (int r : cert) {
    acc ^= rows_[r];
    b ^= rhs_[r];
  }
  return !acc.any() && b == 1;
}

std::vector<std::vector<uint8_t>> Gf2System::kernel_basis() const {
  // Eliminate, then for each free column produce the canonical kernel vector.
  std::vector<BitRow> a = rows_;
  std::vector<int> pivot_row_of_col(ncols_, -1);
  const int m = num_rows();
  for (int i = 0; i < m; ++i) {
    for (;;) {
      int j = a[i].first_set(ncols_);
      if (j < 0) break;
      int p = pivot_row_of_col[j];
      if (p < 0) break;
      a[i] ^= a[p];
    }
    int j = a[i].first_set(ncols_);
    if (j >= 0) pivot_row_of_col[j] = i;
  }
  std::vector<std::vector<uint8_t>> basis;
  for (int f = 0; f < ncols_; ++f) {
    if (pivot_row_of_col[f] >= 0) continue;
    std::vector<uint8_t> x(ncols_, 0);
    x[f] = 1;
    for (int j = ncols_ - 1; j >= 0; --j) {
      int p = pivot_row_of_col[j];
      if (p < 0) continue;
      uint8_t val = 0;
      for (int k = j + 1; k < ncols_; ++k)
        if (a[p].get(k)) val ^= x[k];
      x[j] = val;
    }
    basis.push_back(std::move(x));
  }
  return basis;
}

void ModSystem::add_row(const std::vector<std::pair<int, int>>& entries, int b) {
  std::vector<int> row(ncols, 0);
  for (auto [c, v] : entries) row[c] = ((row[c] + v) % modulus + modulus) % modulus;
  rows.push_back(std::move(row));
  rhs.push_back(((b % modulus) + modulus) % modulus);
}

namespace {
// extended gcd: returns g, x, y with a x + b y = g
long long egcd(long long a, long long b, long long& x, long long& y) {
  if (b == 0) { x = 1; y = 0; return a; }
  long long x1, y1;
  long long g = egcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}
}  // namespace

std::optional<std::vector<int>> ModSystem::solve() const {
  const int M = modulus;
  std::vector<std::vector<int>> a = rows;
  std::vector<int> b = rhs;
  std::vector<int> pivot_col;
  std::vector<int> pivot_row;

  int row = 0;
  for (int col = 0; col < ncols && row < static_cast<int>(a.size()); ++col) {
    const int m = static_cast<int>(a.size());
    // Find the row minimizing gcd(coeff, M); combine rows (Bezout) so the
    // pivot divides every other coefficient in the column.
    int best = -1;
    long long best_g = M;
    for (int i = row; i < m; ++i) {
      if (a[i][col] % M == 0) continue;
      long long g = std::gcd((long long)a[i][col], (long long)M);
      if (g < best_g) { best_g = g; best = i; }
    }
    if (best < 0) continue;
    std::swap(a[row], a[best]);
    std::swap(b[row], b[best]);
    for (int i = row + 1; i < m; ++i) {
      if (a[i][col] % M == 0) continue;
      long long x, y;
      long long g = egcd(a[row][col], a[i][col], x, y);
      // new_row_r = x*row + y*row_i has coefficient g; row_i gets zeroed.
      long long fr = a[row][col] / g, fi = a[i][col] / g;
      std::vector<int> comb(ncols);
      for (int j = 0; j < ncols; ++j) {
        comb[j] = int((((x * a[row][j] + y * a[i][j]) % M) + M) % M);
        a[i][j] = int(((((long long)fr * a[i][j] - fi * a[row][j]) % M) + M) % M);
      }
      int comb_b = int((((x * b[row] + y * b[i]) % M) + M) % M);
      b[i] = int(((((long long)fr * b[i] - fi * b[row]) % M) + M) % M);
      a[row] = comb;
      b[row] = comb_b;
    }
    // Howell annihilator: a zero-divisor pivot leaves residual constraints on
    // the later columns; append (M/g)*row so they are eliminated too.
    long long g0 = std::gcd((long long)a[row][col], (long long)M);
    if (g0 > 1) {
      long long ann = M / g0;
      std::vector<int> extra(ncols);
      bool nonzero = false;
      for (int j = 0; j < ncols; ++j) {
        extra[j] = int((ann * a[row][j]) % M);
        if (j > col && extra[j] != 0) nonzero = true;
      }
      int extra_b = int((ann * b[row]) % M);
      if (nonzero || extra_b != 0) {
        a.push_back(std::move(extra));
        b.push_back(extra_b);
      }
    }
    pivot_col.push_back(col);
    pivot_row.push_back(row);
    ++row;
  }
  // Remaining rows must be 0 = 0.
  for (int i = row; i < static_cast<int>(a.size()); ++i) {
    bool zero = true;
    for (int j = 0; j < ncols; ++j) zero &= (a[i][j] % M == 0);
    if (zero && b[i] % M != 0) return std::nullopt;
  }
  // Back substitution, free variables zero.
  std::vector<int> x(ncols, 0);
  for (int p = static_cast<int>(pivot_col.size()) - 1; p >= 0; --p) {
    int r = pivot_row[p], c = pivot_col[p];
    long long s = b[r];
    for (int j = c + 1; j < ncols; ++j) s -= (long long)a[r][j] * x[j];
    s = ((s % M) + M) % M;
    long long piv = a[r][c] % M;
    long long g = std::gcd(piv, (long long)M);
    if (s % g != 0) return std::nullopt;
    // solve piv * t = s (mod M)
    long long pm = piv / g, sm = s / g, Mg = M / g;
    long long inv, dummy;
    egcd(pm % Mg, Mg, inv, dummy);
    inv = ((inv % Mg) + Mg) % Mg;
    x[c] = int((sm % Mg) * inv % Mg);
  }
  if (!check(x)) return std::nullopt;
  return x;
}

bool ModSystem::check(const std::vector<int>& x) const {
  for (size_t i = 0; i < rows.size(); ++i) {
    long long s = 0;
    for (int j = 0; j < ncols; ++j) s += (long long)rows[i][j] * x[j];
    if ((((s - rhs[i]) % modulus) + modulus) % modulus != 0) return false;
  }
  return true;
}

}  // namespace etale::gf2
