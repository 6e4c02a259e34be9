#include "doctest.h"

#include <random>

#include "etale/exactc.hpp"
#include "etale/rational.hpp"
#include "etale/smallmat.hpp"

using namespace etale;

TEST_CASE("rational arithmetic normalizes and stays exact") {
  Rat a(2, 4), b(1, 3);
  CHECK(a == Rat(1, 2));
  CHECK((a + b) == Rat(5, 6));
  CHECK((a * b) == Rat(1, 6));
  CHECK((a - Rat(1)) == Rat(-1, 2));
  CHECK(Rat(-7, 3).mod1() == Rat(2, 3));
  CHECK(Rat(-7, 3).floor() == -3);
  CHECK(Rat(5, 3).floor() == 1);
}

TEST_CASE("exact sqrt recognizes rational and sqrt3 cases") {
  auto s = exact_sqrt(Rat(4, 9));
  CHECK(s.ok);
  CHECK_FALSE(s.sqrt3_part);
  CHECK(s.rational == Rat(2, 3));

  auto t = exact_sqrt(Rat(4, 3));  // = (2/3)^2 * 3
  CHECK(t.ok);
  CHECK(t.sqrt3_part);
  CHECK(t.coeff == Rat(2, 3));

  CHECK_FALSE(exact_sqrt(Rat(2)).ok);
}

TEST_CASE("ExactC field operations") {
  ExactC z{Rat(1, 2), Rat(-1, 3), Rat(2), Rat(1, 5)};
  ExactC w{Rat(3), Rat(1), Rat(0), Rat(-2)};
  CHECK((z * w) * z.inverse() == w * (z * z.inverse()));
  CHECK(z * z.inverse() == ExactC(Rat(1)));
  CHECK((z + w) - w == z);
  // i^2 = -1, sqrt3^2 = 3
  CHECK(ExactC::i() * ExactC::i() == ExactC(Rat(-1)));
  CHECK(ExactC::sqrt3() * ExactC::sqrt3() == ExactC(Rat(3)));

  std::mt19937 rng(12345);
  auto rnd = [&]() {
    std::uniform_int_distribution<int> d(-6, 6);
    ExactC v{Rat(d(rng), 1 + std::abs(d(rng))), Rat(d(rng), 1 + std::abs(d(rng))),
             Rat(d(rng), 1 + std::abs(d(rng))), Rat(d(rng), 1 + std::abs(d(rng)))};
    return v;
  };
  for (int k = 0; k < 200; ++k) {
    ExactC x = rnd(), y = rnd(), v = rnd();
    CHECK(x * (y + v) == x * y + x * v);
    CHECK((x * y).conj() == x.conj() * y.conj());
    if (!x.is_zero()) CHECK(x * x.inverse() == ExactC(Rat(1)));
    // double image consistency
    auto xd = x.to_complex(), yd = y.to_complex(), pd = (x * y).to_complex();
    CHECK(std::abs(xd * yd - pd) < 1e-12 * (1.0 + std::abs(pd)));
  }
}

TEST_CASE("small integer and rational matrices") {
  IMat r(2);
  r.at(0, 0) = 0; r.at(0, 1) = -1;
  r.at(1, 0) = 1; r.at(1, 1) = 0;
  CHECK(r.det() == 1);
  CHECK(r * r.inverse() == IMat::identity(2));

  IMat hex(2);
  hex.at(0, 0) = 0; hex.at(0, 1) = -1;
  hex.at(1, 0) = 1; hex.at(1, 1) = -1;
  CHECK(hex * hex * hex == IMat::identity(2));

  RatMat g(2);
  g.at(0, 0) = Rat(1); g.at(0, 1) = Rat(-1, 2);
  g.at(1, 0) = Rat(-1, 2); g.at(1, 1) = Rat(1);
  RatMat gi = g.inverse();
  CHECK(g * gi == RatMat::identity(2));
  CHECK(g.det() == Rat(3, 4));
}
