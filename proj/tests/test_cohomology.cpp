#include "doctest.h"

#include <random>

#include "etale/cohomology.hpp"
#include "fixtures.hpp"

using namespace etale;
using namespace etale::groupoid;
using namespace etale::cohomology;

namespace {

Z2Cochain random_cochain(int degree, size_t size, std::mt19937& rng) {
  Z2Cochain c;
  c.degree = degree;
  c.values.resize(size);
  for (auto& v : c.values) v = uint8_t(rng() % 2);
  return c;
}

}  // namespace

TEST_CASE("coboundary formulas and d(d(.)) = 0 over the finite nerve") {
  auto p = fixtures::circle_reflect(32, 4);
  Nerve nerve = Nerve::build(p);
  std::mt19937 rng(2024);

  for (int trial = 0; trial < 10; ++trial) {
    Z2Cochain eps = random_cochain(0, p.charts.size(), rng);
    Z2Cochain d0 = coboundary(p, nerve, eps);
    for (const auto& comp : p.components)
      CHECK(d0.values[comp.id] == (eps.values[comp.tgt] ^ eps.values[comp.src]));
    Z2Cochain dd = coboundary(p, nerve, d0);
    for (auto v : dd.values) CHECK(v == 0);
  }
  // zero 1-cochain maps to zero 2-cochain
  Z2Cochain zero;
  zero.degree = 1;
  zero.values.assign(p.components.size(), 0);
  for (auto v : coboundary(p, nerve, zero).values) CHECK(v == 0);
}

TEST_CASE("structure cocycle values") {
  SUBCASE("unit torus: all identity") {
    auto p = fixtures::unit_torus2(16, 4);
    auto sc = structure_cocycle(p);
    CHECK(sc.exact);
    for (const auto& comp : p.components)
      CHECK(sc.value[comp.id] == ExactMat::identity(2));
  }
  SUBCASE("klein bottle glides act by diag(1,-1)") {
    auto p = fixtures::klein_bottle(16, 4);
    auto sc = structure_cocycle(p);
    ExactMat flip = ExactMat::identity(2);
    flip.at(1, 1) = ExactC(Rat(-1));
    bool saw_glide = false;
    for (const auto& comp : p.components) {
      if (p.group[comp.group_index].a == IMat::identity(2)) continue;
      saw_glide = true;
      CHECK(sc.value[comp.id] == flip);
      CHECK(sc.det_sign[comp.id] == -1);
    }
    CHECK(saw_glide);
  }
  SUBCASE("hexagonal Z3 values are exactly orthogonal in the Cholesky gauge") {
    auto p = fixtures::hex_z3(24, 3);
    auto gram = invariant_gram(p, RatMat::identity(2));
    CHECK(gram.at(0, 1) * Rat(-2) == gram.at(0, 0));  // shape [[1,-1/2],[-1/2,1]] scaled
    auto sc = structure_cocycle(p, gram);
    CHECK(sc.exact);
    // double mirror stays orthogonal to machine accuracy
    for (const auto& comp : p.components) {
      auto& v = sc.value[comp.id];
      double r00 = v.at(0, 0).to_complex().real(), r01 = v.at(0, 1).to_complex().real();
      double r10 = v.at(1, 0).to_complex().real(), r11 = v.at(1, 1).to_complex().real();
      CHECK(std::abs(r00 * r00 + r10 * r10 - 1.0) < 1e-12);
      CHECK(std::abs(r00 * r01 + r10 * r11) < 1e-12);
    }
  }
}

TEST_CASE("w1 verdicts with exhaustive oracle") {
  SUBCASE("unit torus is orientable with zero witness") {
    auto p = fixtures::unit_torus2(16, 4);
    auto v = w1(p, structure_cocycle(p));
    CHECK(v.trivial);
    for (auto e : v.witness.values) CHECK(e == 0);
  }
  SUBCASE("klein bottle is non-orientable") {
    auto p = fixtures::klein_bottle(16, 4);
    auto sc = structure_cocycle(p);
    auto v = w1(p, sc);
    CHECK_FALSE(v.trivial);
    CHECK_FALSE(w1_exhaustive(p, sc).has_value());
    // certificate replays to a contradiction
    gf2::Gf2System sys(int(p.charts.size()));
    for (const auto& comp : p.components)
      sys.add_row({comp.src, comp.tgt}, sc.det_sign[comp.id] < 0);
    CHECK(sys.check_certificate(v.certificate));
  }
  SUBCASE("circle reflection is non-orientable") {
    auto p = fixtures::circle_reflect(32, 4);
    auto sc = structure_cocycle(p);
    CHECK_FALSE(w1(p, sc).trivial);
    CHECK_FALSE(w1_exhaustive(p, sc).has_value());
  }
  SUBCASE("rotation quotients are orientable") {
    for (auto* build : {+[] { return fixtures::pillow_z2(24, 3); },
                        +[] { return fixtures::pillow_z4(16, 4); },
                        +[] { return fixtures::hex_z3(24, 3); }}) {
      auto p = build();
      auto sc = structure_cocycle(p);
      auto v = w1(p, sc);
      CHECK(v.trivial);
      CHECK(w1_exhaustive(p, sc).has_value());
    }
  }
}

static cohomology::StructureCocycle oriented_cocycle(const groupoid::GroupoidPresentation& p) {
  auto sc = structure_cocycle(p);
  auto v = w1(p, sc);
  REQUIRE(v.trivial);
  return orient(p, sc, v.witness);
}

TEST_CASE("orientation gauge produces exact rotations") {
  auto p = fixtures::pillow_z4(16, 4);
  auto so = oriented_cocycle(p);
  for (const auto& comp : p.components) {
    CHECK(so.det_sign[comp.id] == 1);
    Rat t = so.turn[comp.id];
    CHECK((t * Rat(4)).is_integer());  // quarter turns only
    if (comp.group_index == 0) CHECK(t == Rat(0));
  }
  auto ph = fixtures::hex_z3(24, 3);
  auto soh = oriented_cocycle(ph);
  for (const auto& comp : ph.components) {
    Rat t = soh.turn[comp.id];
    CHECK((t * Rat(3)).is_integer());  // third turns
  }
}

TEST_CASE("spin lifting verdicts with the group-level exhaustive oracle") {
  SUBCASE("unit torus lifts trivially") {
    auto p = fixtures::unit_torus2(16, 4);
    auto res = spin_lift(p, oriented_cocycle(p));
    REQUIRE(std::holds_alternative<SpinStructure>(res));
    const auto& s = std::get<SpinStructure>(res);
    for (const auto& comp : p.components) {
      CHECK(s.half_turn[comp.id] == Rat(0));
      CHECK(s.phase[comp.id] == Rat(0));
    }
  }
  SUBCASE("Z4 pillow is obstructed (w2 nontrivial)") {
    auto p = fixtures::pillow_z4(16, 4);
    auto so = oriented_cocycle(p);
    auto res = spin_lift(p, so);
    REQUIRE(std::holds_alternative<ObstructionVerdict>(res));
    auto oracle = w2_group_exhaustive(p, so);
    REQUIRE(oracle.has_value());
    CHECK_FALSE(*oracle);
    // certificate is replayable
    const auto& v = std::get<ObstructionVerdict>(res);
    Nerve nerve = Nerve::build(p);
    gf2::Gf2System sys(int(p.components.size()));
    for (auto [second, first] : nerve.pairs) {
      int comp = p.compose(second, first);
      Rat k = so.turn[second] + so.turn[first] - so.turn[comp];
      sys.add_row({second, first, comp}, k.num() % 2 != 0);
    }
    CHECK(sys.check_certificate(v.certificate));
  }
  SUBCASE("Z2 pillow is also obstructed: the isotropy pulls back Z4 -> Z2") {
    auto p = fixtures::pillow_z2(24, 3);
    auto so = oriented_cocycle(p);
    CHECK(std::holds_alternative<ObstructionVerdict>(spin_lift(p, so)));
    auto oracle = w2_group_exhaustive(p, so);
    REQUIRE(oracle.has_value());
    CHECK_FALSE(*oracle);
  }
  SUBCASE("hexagonal Z3 is spin; lift verified multiplicative") {
    auto p = fixtures::hex_z3(24, 3);
    auto so = oriented_cocycle(p);
    auto res = spin_lift(p, so);
    REQUIRE(std::holds_alternative<SpinStructure>(res));
    const auto& s = std::get<SpinStructure>(res);
    CHECK(spin_is_multiplicative(p, s));
    // covering property: 2 * half_turn = rotation turn
    for (const auto& comp : p.components)
      CHECK((Rat(2) * s.half_turn[comp.id]).mod1() == so.turn[comp.id]);
    auto oracle = w2_group_exhaustive(p, so);
    REQUIRE(oracle.has_value());
    CHECK(*oracle);
  }
  SUBCASE("free Z4 circle rotation is spin (n=1 trivial line bundle)") {
    auto p = fixtures::circle_z4(32, 4);
    auto res = spin_lift(p, oriented_cocycle(p));
    CHECK(std::holds_alternative<SpinStructure>(res));
  }
}

TEST_CASE("projective phase-corrected lift exists on the Z2 pillow") {
  auto p = fixtures::pillow_z2(24, 3);
  auto so = oriented_cocycle(p);
  auto res = projective_lift(p, so);
  REQUIRE(std::holds_alternative<SpinStructure>(res));
  const auto& s = std::get<SpinStructure>(res);
  CHECK(s.projective);
  CHECK(s.phase_modulus == 4);
  CHECK(spin_is_multiplicative(p, s));
  // operator entries stay in Q(i, sqrt3): phase +- half_turn is a twelfth turn
  for (const auto& comp : p.components) {
    CHECK_NOTHROW(exactc_of_turn(s.phase[comp.id] + s.half_turn[comp.id]));
    CHECK_NOTHROW(exactc_of_turn(s.phase[comp.id] - s.half_turn[comp.id]));
  }
}

TEST_CASE("refinement invariance of w1 and w2 verdicts") {
  auto klein = fixtures::klein_bottle(16, 4);
  CHECK_FALSE(w1(klein, structure_cocycle(klein)).trivial);
  auto klein2 = refine_cover(klein, 2);
  CHECK_FALSE(w1(klein2, structure_cocycle(klein2)).trivial);

  auto hex = fixtures::hex_z3(24, 3);
  auto hex2 = refine_cover(hex, 2);
  CHECK(std::holds_alternative<SpinStructure>(spin_lift(hex2, oriented_cocycle(hex2))));

  auto pil = fixtures::pillow_z4(16, 4);
  auto pil2 = refine_cover(pil, 2);
  CHECK(std::holds_alternative<ObstructionVerdict>(spin_lift(pil2, oriented_cocycle(pil2))));
}

TEST_CASE("gauge changes move witnesses but never verdicts") {
  std::mt19937 rng(0x5EED);
  for (auto* build : {+[] { return fixtures::klein_bottle(16, 4); },
                      +[] { return fixtures::unit_torus2(16, 4); }}) {
    auto p = build();
    auto sc = structure_cocycle(p);
    bool base_verdict = w1(p, sc).trivial;
    for (int trial = 0; trial < 8; ++trial) {
      StructureCocycle gauged = sc;
      std::vector<uint8_t> eps(p.charts.size());
      for (auto& e : eps) e = uint8_t(rng() % 2);
      for (const auto& comp : p.components)
        if (eps[comp.src] ^ eps[comp.tgt])
          gauged.det_sign[comp.id] = -gauged.det_sign[comp.id];
      CHECK(w1(p, gauged).trivial == base_verdict);
    }
  }
}

TEST_CASE("cohomologous class tests") {
  auto p = fixtures::klein_bottle(16, 4);
  auto sc = structure_cocycle(p);
  Z2Cochain q;
  q.degree = 1;
  q.values.resize(p.components.size());
  for (const auto& comp : p.components)
    q.values[comp.id] = sc.det_sign[comp.id] < 0;

  auto same = cohomologous(p, q, q);
  CHECK(same.trivial);

  std::mt19937 rng(99);
  Z2Cochain eps0 = random_cochain(0, p.charts.size(), rng);
  Nerve nerve = Nerve::build(p);
  Z2Cochain shifted = q;
  Z2Cochain d = coboundary(p, nerve, eps0);
  for (size_t i = 0; i < shifted.values.size(); ++i) shifted.values[i] ^= d.values[i];
  auto v = cohomologous(p, q, shifted);
  REQUIRE(v.trivial);
  Z2Cochain w;
  w.degree = 0;
  w.values = v.witness.values;
  Z2Cochain dw = coboundary(p, nerve, w);
  for (const auto& comp : p.components)
    CHECK(dw.values[comp.id] == (q.values[comp.id] ^ shifted.values[comp.id]));

  Z2Cochain zero;
  zero.degree = 1;
  zero.values.assign(p.components.size(), 0);
  CHECK_FALSE(cohomologous(p, q, zero).trivial);
}

TEST_CASE("H1(., Z2) classes count the inequivalent spin structures") {
  auto circle = fixtures::unit_circle(32, 4);
  CHECK(h1_z2_classes(circle).size() == 2);

  auto torus = fixtures::unit_torus2(16, 4);
  CHECK(h1_z2_classes(torus).size() == 4);

  auto z4 = fixtures::circle_z4(32, 4);
  auto classes = h1_z2_classes(z4);
  CHECK(classes.size() == 2);

  Nerve nerve = Nerve::build(z4);
  for (const auto& z : classes) {
    for (size_t i = 0; i < nerve.pairs.size(); ++i) {
      auto [second, first] = nerve.pairs[i];
      int comp = z4.compose(second, first);
      CHECK(uint8_t(z.values[second] ^ z.values[first] ^ z.values[comp]) == 0);
    }
  }
}

TEST_CASE("n=3 spin lifts of signed-permutation actions") {
  CoverParams cov;
  cov.boxes_per_axis = 3;
  FlatBase b3 = fixtures::base(3, 12);

  SUBCASE("cyclic axis permutation is spin") {
    GroupElem g;
    g.a = IMat(3);
    g.a.at(0, 2) = 1;
    g.a.at(1, 0) = 1;
    g.a.at(2, 1) = 1;  // e1->e2->e3->e1
    g.b = RatVec(3);
    auto p = build_quotient_presentation({g}, b3, cov);
    CHECK(p.group.size() == 3);
    auto res = spin_lift(p, oriented_cocycle(p));
    REQUIRE(std::holds_alternative<SpinStructure>(res));
    CHECK(spin_is_multiplicative(p, std::get<SpinStructure>(res)));
  }
  SUBCASE("pi-rotation about an axis is obstructed") {
    GroupElem g;
    g.a = IMat(3);
    g.a.at(0, 0) = 1;
    g.a.at(1, 1) = -1;
    g.a.at(2, 2) = -1;
    g.b = RatVec(3);
    auto p = build_quotient_presentation({g}, b3, cov);
    auto res = spin_lift(p, oriented_cocycle(p));
    CHECK(std::holds_alternative<ObstructionVerdict>(res));
  }
}
