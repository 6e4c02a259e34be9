#include "doctest.h"

#include <random>

#include "etale/bundle.hpp"
#include "fixtures.hpp"

using namespace etale;
using namespace etale::groupoid;
using namespace etale::bundle;
using etale::cohomology::SpinStructure;

namespace {

cohomology::StructureCocycle oriented(const GroupoidPresentation& p) {
  auto sc = cohomology::structure_cocycle(p);
  auto v = cohomology::w1(p, sc);
  REQUIRE(v.trivial);
  return cohomology::orient(p, sc, v.witness);
}

ExactMat random_posdef(int n, std::mt19937& rng) {
  // B* B + I with small random dyadic entries
  ExactMat b(n);
  std::uniform_int_distribution<int> d(-4, 4);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      b.at(i, j) = ExactC(Rat(d(rng), 4), Rat(0), Rat(d(rng), 4), Rat(0));
  ExactMat g = b.adjoint() * b;
  for (int i = 0; i < n; ++i) g.at(i, i) += ExactC(Rat(1));
  return g;
}

}  // namespace

TEST_CASE("clifford generators satisfy the exact relations") {
  for (int n = 1; n <= 3; ++n) {
    auto cl = clifford_generators(n);
    for (int i = 0; i < n; ++i) {
      CHECK(cl.gamma[i] == cl.gamma[i].adjoint());  // hermitian
      for (int j = 0; j < n; ++j) {
        ExactMat anti = cl.gamma[i] * cl.gamma[j] + cl.gamma[j] * cl.gamma[i];
        ExactMat expect(cl.dim);
        if (i == j) expect = ExactC(Rat(2)) * ExactMat::identity(cl.dim);
        CHECK(anti == expect);
      }
    }
  }
  auto cl2 = clifford_generators(2);
  CHECK(cl2.omega * cl2.omega == ExactMat::identity(2));
  for (int i = 0; i < 2; ++i)
    CHECK(cl2.omega * cl2.gamma[i] + cl2.gamma[i] * cl2.omega == ExactMat(2));
  // n = 1: module is the complex line
  CHECK(clifford_generators(1).dim == 1);
}

TEST_CASE("bundle reconstruction from cocycle data") {
  auto p = fixtures::klein_bottle(16, 4);
  auto so = cohomology::structure_cocycle(p);

  SUBCASE("identity cocycle gives the trivial action") {
    std::vector<ExactMat> triv(p.components.size(), ExactMat::identity(1));
    auto b = reconstruct_bundle(p, triv, 1);
    for (const auto& m : b.cocycle) CHECK(m == ExactMat::identity(1));
  }
  SUBCASE("klein glides flip the second fibre axis") {
    auto b = reconstruct_bundle(p, so.value, 2);
    for (const auto& comp : p.components) {
      if (p.group[comp.group_index].a == IMat::identity(2)) continue;
      ExactC e01 = b.cocycle[comp.id].at(0, 0);
      CHECK(e01 == ExactC(Rat(1)));
      CHECK(b.cocycle[comp.id].at(1, 1) == ExactC(Rat(-1)));
    }
  }
  SUBCASE("a corrupted table is rejected") {
    auto bad = so.value;
    bad[0] = ExactC(Rat(-1)) * bad[0];
    bool violates = false;
    // flipping one unit component breaks some composition unless isolated
    try {
      reconstruct_bundle(p, bad, 2);
    } catch (const NotACocycle&) {
      violates = true;
    }
    CHECK(violates);
  }
  SUBCASE("cohomologous cocycles give unitarily equivalent actions") {
    std::mt19937 rng(7);
    // gauge by random diagonal signs per chart
    std::vector<ExactMat> f(p.charts.size());
    for (auto& m : f) {
      m = ExactMat::identity(2);
      if (rng() % 2) m.at(0, 0) = ExactC(Rat(-1));
      if (rng() % 2) m.at(1, 1) = ExactC(Rat(-1));
    }
    std::vector<ExactMat> moved(p.components.size());
    for (const auto& comp : p.components)
      moved[comp.id] = f[comp.tgt] * so.value[comp.id] * f[comp.src].adjoint();
    auto b2 = reconstruct_bundle(p, moved, 2);
    // the explicit intertwiner f carries one action to the other
    for (const auto& comp : p.components) {
      ExactMat lhs = b2.cocycle[comp.id] * f[comp.src];
      ExactMat rhs = f[comp.tgt] * so.value[comp.id];
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("averaged inner product is exactly invariant") {
  SUBCASE("already invariant metric is returned unchanged") {
    auto p = fixtures::circle_reflect(32, 4);
    auto idx = ChartIndex::build(p);
    auto so = cohomology::structure_cocycle(p);
    auto b = reconstruct_bundle(p, so.value, 1);
    auto seed = constant_metric(p, idx, ExactMat::identity(1));
    auto avg = average_inner_product(p, idx, b, seed);
    for (size_t a = 0; a < p.charts.size(); ++a)
      for (size_t k = 0; k < idx.points[a].size(); ++k)
        CHECK(avg[a][k] == seed[a][k]);
  }
  SUBCASE("Z3 hexagonal tangent bundle from the identity seed") {
    auto p = fixtures::hex_z3(24, 3);
    auto idx = ChartIndex::build(p);
    // torus-frame tangent cocycle: the integer germ matrices
    std::vector<ExactMat> coc(p.components.size());
    for (const auto& comp : p.components) {
      ExactMat m(2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m.at(i, j) = ExactC(Rat(comp.germ.a.at(i, j)));
      coc[comp.id] = m;
    }
    BundleData b;
    b.rank = 2;
    b.cocycle = coc;  // orthogonality not required for the metric average
    auto seed = constant_metric(p, idx, ExactMat::identity(2));
    auto avg = average_inner_product(p, idx, b, seed);
    // constant, invariant: A^T G A = G for the generator
    ExactMat g = avg[0][0];
    for (size_t a = 0; a < p.charts.size(); ++a)
      for (const auto& m : avg[a]) CHECK(m == g);
    for (const auto& comp : p.components) {
      ExactMat at(2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) at.at(i, j) = ExactC(Rat(comp.germ.a.at(j, i)));
      CHECK(at * g * coc[comp.id] == g);  // A^T G A = G exactly
    }
    // direct invariance check through the library predicate
    CHECK(metric_is_invariant(p, idx, b, avg));
  }
  SUBCASE("random positive seed on the Z2 reflection: residual exactly zero") {
    auto p = fixtures::circle_reflect(32, 4);
    auto idx = ChartIndex::build(p);
    auto so = cohomology::structure_cocycle(p);
    auto b = reconstruct_bundle(p, so.value, 1);
    std::mt19937 rng(11);
    MetricField seed(p.charts.size());
    for (size_t a = 0; a < p.charts.size(); ++a) {
      seed[a].resize(idx.points[a].size());
      for (auto& m : seed[a]) m = random_posdef(1, rng);
    }
    auto avg = average_inner_product(p, idx, b, seed);
    CHECK(metric_is_invariant(p, idx, b, avg));
    // idempotence on its own output
    auto avg2 = average_inner_product(p, idx, b, avg);
    for (size_t a = 0; a < p.charts.size(); ++a)
      for (size_t k = 0; k < idx.points[a].size(); ++k) CHECK(avg2[a][k] == avg[a][k]);
  }
}

TEST_CASE("averaged connection: invariance, idempotence, hermitian projection") {
  auto p = fixtures::circle_z4(32, 4);
  auto idx = ChartIndex::build(p);
  std::vector<ExactMat> triv(p.components.size(), ExactMat::identity(1));
  auto b = reconstruct_bundle(p, triv, 1);

  SUBCASE("flat seed with constant unitary cocycle averages to zero") {
    auto a0 = zero_connection(p, idx, 1);
    auto avg = average_connection(p, idx, b, a0);
    for (size_t a = 0; a < p.charts.size(); ++a)
      for (const auto& axes : avg.coeff[a])
        CHECK(axes[0].is_zero());
  }
  SUBCASE("random dyadic seed averages to an exactly invariant connection") {
    std::mt19937 rng(23);
    std::uniform_int_distribution<int> d(-8, 8);
    auto seed = zero_connection(p, idx, 1);
    for (auto& chart : seed.coeff)
      for (auto& axes : chart)
        axes[0].at(0, 0) = ExactC(Rat(0), Rat(0), Rat(d(rng), 16), Rat(0));
    auto avg = average_connection(p, idx, b, seed);
    CHECK(connection_is_invariant(p, idx, b, avg));
    auto avg2 = average_connection(p, idx, b, avg);
    for (size_t a = 0; a < p.charts.size(); ++a)
      for (size_t k = 0; k < idx.points[a].size(); ++k)
        CHECK(avg2.coeff[a][k][0] == avg.coeff[a][k][0]);
    // anti-hermitian seeds stay anti-hermitian: projection does not move them
    bool moved = true;
    hermitian_projection(p, idx, avg, ExactMat::identity(1), moved);
    CHECK_FALSE(moved);
  }
  SUBCASE("hermitian projection kills the selfadjoint part") {
    auto seed = zero_connection(p, idx, 1);
    seed.coeff[0][0][0].at(0, 0) = ExactC(Rat(1), Rat(0), Rat(1), Rat(0));  // 1 + i
    bool moved = false;
    auto proj = hermitian_projection(p, idx, seed, ExactMat::identity(1), moved);
    CHECK(moved);
    CHECK(proj.coeff[0][0][0].at(0, 0) == ExactC(Rat(0), Rat(0), Rat(1), Rat(0)));
  }
}

TEST_CASE("spin action matrices") {
  SUBCASE("unit components act as the identity; composition replays the table") {
    auto p = fixtures::hex_z3(24, 3);
    auto so = oriented(p);
    auto res = cohomology::spin_lift(p, so);
    REQUIRE(std::holds_alternative<SpinStructure>(res));
    const auto& s = std::get<SpinStructure>(res);
    auto cl = clifford_generators(2);
    auto rho = spin_action(p, s, cl);
    for (const auto& comp : p.components)
      if (p.is_unit(comp.id)) CHECK(rho[comp.id] == ExactMat::identity(2));
    cohomology::Nerve nerve = cohomology::Nerve::build(p);
    for (auto [second, first] : nerve.pairs) {
      int comp = p.compose(second, first);
      CHECK(rho[second] * rho[first] == rho[comp]);
    }
    // adjoint identity: rho gamma(u) rho^{-1} = gamma(R u) for the gauged frame,
    // checked on the orthonormal basis with exact rotation entries
    for (const auto& comp : p.components) {
      Rat r = so.turn[comp.id];
      ExactC e = cohomology::exactc_of_turn(r);
      for (int basis = 0; basis < 2; ++basis) {
        ExactMat lhs = rho[comp.id] * cl.gamma[basis] * rho[comp.id].adjoint();
        // R u for u = e_basis with R = [[c,-s],[s,c]]
        ExactC c{e.a, e.b, Rat(0), Rat(0)}, sn{e.c, e.d, Rat(0), Rat(0)};
        ExactMat rhs(2);
        if (basis == 0)
          rhs = c * cl.gamma[0] + sn * cl.gamma[1];
        else
          rhs = (-sn) * cl.gamma[0] + c * cl.gamma[1];
        CHECK(lhs == rhs);
      }
    }
    // diagonal form matches the fixed basis convention
    for (const auto& comp : p.components) {
      if (p.is_unit(comp.id)) continue;
      CHECK(rho[comp.id].at(0, 1).is_zero());
      CHECK(rho[comp.id].at(1, 0).is_zero());
    }
  }
  SUBCASE("projective pillow action squares to the identity") {
    auto p = fixtures::pillow_z2(24, 3);
    auto so = oriented(p);
    auto res = cohomology::projective_lift(p, so);
    REQUIRE(std::holds_alternative<SpinStructure>(res));
    auto rho = spin_action(p, std::get<SpinStructure>(res), clifford_generators(2));
    cohomology::Nerve nerve = cohomology::Nerve::build(p);
    for (auto [second, first] : nerve.pairs) {
      int comp = p.compose(second, first);
      CHECK(rho[second] * rho[first] == rho[comp]);
    }
  }
}
