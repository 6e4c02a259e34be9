#include "doctest.h"

#include <random>

#include "etale/gf2.hpp"

using namespace etale::gf2;

TEST_CASE("gf2 elimination agrees with exhaustive search on random systems") {
  std::mt19937 rng(777);
  for (int trial = 0; trial < 200; ++trial) {
    int ncols = 1 + int(rng() % 10);
    int nrows = 1 + int(rng() % 14);
    Gf2System sys(ncols);
    for (int r = 0; r < nrows; ++r) {
      std::vector<int> cols;
      for (int c = 0; c < ncols; ++c)
        if (rng() % 2) cols.push_back(c);
      sys.add_row(cols, rng() % 2);
    }
    auto res = sys.solve();
    auto brute = sys.exhaustive_solve();
    CHECK(res.solvable == brute.has_value());
    if (res.solvable) {
      CHECK(sys.check(res.witness));
    } else {
      CHECK(sys.check_certificate(res.certificate));
    }
  }
}

TEST_CASE("gf2 kernel basis spans the solution space of A x = 0") {
  Gf2System sys(5);
  sys.add_row({0, 1}, 0);
  sys.add_row({1, 2}, 0);
  auto basis = sys.kernel_basis();
  CHECK(basis.size() == 3);
  for (const auto& v : basis) CHECK(sys.check(v));
}

TEST_CASE("mod-M solver handles units and zero divisors") {
  // x0 + x1 - x2 = 2 (mod 4), 2*x0 = 2 (mod 4)
  ModSystem sys(3, 4);
  sys.add_row({{0, 1}, {1, 1}, {2, -1}}, 2);
  sys.add_row({{0, 2}}, 2);
  auto x = sys.solve();
  REQUIRE(x.has_value());
  CHECK(sys.check(*x));

  ModSystem bad(1, 4);
  bad.add_row({{0, 2}}, 1);  // 2x = 1 mod 4 has no solution
  CHECK_FALSE(bad.solve().has_value());

  std::mt19937 rng(4242);
  for (int trial = 0; trial < 200; ++trial) {
    int M = 2 * (1 + int(rng() % 6));
    int ncols = 1 + int(rng() % 5);
    ModSystem s(ncols, M);
    int nrows = 1 + int(rng() % 6);
    for (int r = 0; r < nrows; ++r) {
      std::vector<std::pair<int, int>> ent;
      for (int c = 0; c < ncols; ++c)
        if (rng() % 2) ent.push_back({c, int(rng() % M)});
      s.add_row(ent, int(rng() % M));
    }
    auto sol = s.solve();
    // brute force up to M^ncols <= 12^5 combos
    bool brute = false;
    long long total = 1;
    for (int c = 0; c < ncols; ++c) total *= M;
    for (long long mask = 0; mask < total && !brute; ++mask) {
      std::vector<int> x(ncols);
      long long t = mask;
      for (int c = 0; c < ncols; ++c) { x[c] = int(t % M); t /= M; }
      brute = s.check(x);
    }
    CHECK(sol.has_value() == brute);
    if (sol) CHECK(s.check(*sol));
  }
}
