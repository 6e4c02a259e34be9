#include "etale/cohomology.hpp"

#include <algorithm>
#include <map>

namespace etale::cohomology {

using groupoid::CutoffWeights;

Nerve Nerve::build(const GroupoidPresentation& p) {
  Nerve n;
  n.pairs.reserve(p.compose_table.size());
  for (const auto& [key, id] : p.compose_table) {
    (void)id;
    n.pairs.emplace_back(int(key >> 32), int(key & 0xffffffffu));
  }
  std::sort(n.pairs.begin(), n.pairs.end());
  return n;
}

Z2Cochain coboundary(const GroupoidPresentation& p, const Nerve& nerve,
                     const Z2Cochain& c) {
  Z2Cochain out;
  if (c.degree == 0) {
    out.degree = 1;
    out.values.resize(p.components.size());
    for (const auto& comp : p.components)
      out.values[comp.id] = c.values[comp.tgt] ^ c.values[comp.src];
  } else if (c.degree == 1) {
    out.degree = 2;
    out.values.resize(nerve.pairs.size());
    for (size_t i = 0; i < nerve.pairs.size(); ++i) {
      auto [second, first] = nerve.pairs[i];
      int comp = p.compose(second, first);
      out.values[i] = uint8_t(c.values[second] ^ c.values[first] ^ c.values[comp]);
    }
  } else {
    throw std::domain_error("coboundary: degree must be 0 or 1");
  }
  return out;
}

RatMat invariant_gram(const GroupoidPresentation& p, const RatMat& seed) {
  auto cw = groupoid::cutoff_weights(p);
  std::vector<std::unordered_map<size_t, int>> index(p.charts.size());
  for (size_t a = 0; a < p.charts.size(); ++a)
    for (size_t k = 0; k < cw.points[a].size(); ++k) index[a][cw.points[a][k]] = int(k);

  std::optional<RatMat> common;
  for (int a = 0; a < int(p.charts.size()); ++a) {
    groupoid::chart_points_visit(p, a, [&](size_t xidx, const RatVec& lift) {
      RatMat g(p.base.dim);
      for (const auto& comp : p.components) {
        if (comp.src != a || !p.support[comp.id].get(xidx)) continue;
        RatVec y = comp.germ.apply(lift);
        size_t yidx = p.torus_grid_index(y);
        Rat w = cw.values[comp.tgt][index[comp.tgt].at(yidx)];
        RatMat at = to_rat(comp.germ.a);
        g = g + w * (at.transpose() * seed * at);
      }
      if (!common) common = g;
      else if (!(*common == g))
        throw std::runtime_error("averaged metric is not constant over the grid");
    });
  }
  RatMat g = *common;
  for (const auto& comp : p.components) {
    RatMat at = to_rat(comp.germ.a);
    if (!(at.transpose() * g * at == g))
      throw std::runtime_error("averaged metric is not invariant");
  }
  return g;
}

namespace {

// sqrt inside Q(sqrt3) restricted to real elements a + b sqrt3.
std::optional<ExactC> exact_sqrt_field(const Rat& a, const Rat& b) {
  if (b.is_zero()) {
    RatSqrt s = exact_sqrt(a);
    if (!s.ok) return std::nullopt;
    if (!s.sqrt3_part) return ExactC(s.rational);
    ExactC z;
    z.b = s.coeff;
    return z;
  }
  // (x + y sqrt3)^2 = a + b sqrt3  =>  y^2 = [a +- sqrt(a^2 - 3 b^2)]/6, x = b/(2y)
  Rat disc = a * a - Rat(3) * b * b;
  RatSqrt sd = exact_sqrt(disc);
  if (!sd.ok || sd.sqrt3_part) return std::nullopt;
  for (int sign = 0; sign < 2; ++sign) {
    Rat y2 = (a + (sign ? -sd.rational : sd.rational)) / Rat(6);
    if (y2 < Rat(0)) continue;
    RatSqrt sy = exact_sqrt(y2);
    if (!sy.ok || sy.sqrt3_part) continue;
    if (sy.rational.is_zero()) continue;
    Rat y = sy.rational;
    Rat x = b / (Rat(2) * y);
    // choose the positive branch: x + y sqrt3 > 0
    double val = x.to_double() + y.to_double() * 1.7320508075688772;
    ExactC z;
    if (val >= 0) { z.a = x; z.b = y; }
    else { z.a = -x; z.b = -y; }
    return z;
  }
  return std::nullopt;
}

ExactMat exact_from_imat(const IMat& m) {
  ExactMat e(m.n);
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) e.at(i, j) = ExactC(Rat(m.at(i, j)));
  return e;
}

// Inverse of an upper triangular ExactMat by back substitution.
ExactMat invert_upper(const ExactMat& t) {
  int n = t.n;
  ExactMat inv(n);
  for (int col = 0; col < n; ++col) {
    for (int i = n - 1; i >= 0; --i) {
      ExactC s = (i == col) ? ExactC(Rat(1)) : ExactC();
      for (int k = i + 1; k < n; ++k) s -= t.at(i, k) * inv.at(k, col);
      inv.at(i, col) = s * t.at(i, i).inverse();
    }
  }
  return inv;
}

std::optional<ExactMat> exact_cholesky(const RatMat& g) {
  int n = g.n;
  ExactMat L(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      ExactC s{g.at(i, j), Rat(0), Rat(0), Rat(0)};
      for (int k = 0; k < j; ++k) s -= L.at(i, k) * L.at(j, k);
      if (i == j) {
        auto r = exact_sqrt_field(s.a, s.b);
        if (!r || r->is_zero()) return std::nullopt;
        L.at(i, i) = *r;
      } else {
        L.at(i, j) = s * L.at(j, j).inverse();
      }
    }
  }
  return L;
}

}  // namespace

ExactC exactc_of_turn(const Rat& u) {
  Rat t = u.mod1();
  Rat k12 = t * Rat(12);
  if (!k12.is_integer())
    throw UnsupportedPhase("turn " + u.str() + " is outside Q(i,sqrt3)");
  int k = int(k12.num() % 12);
  const Rat h(1, 2);
  auto mk = [](Rat a, Rat b, Rat c, Rat d) { return ExactC{a, b, c, d}; };
  switch (k) {
    case 0:  return mk(Rat(1), Rat(0), Rat(0), Rat(0));
    case 1:  return mk(Rat(0), h, h, Rat(0));            // cos30 = s3/2, sin30 = 1/2
    case 2:  return mk(h, Rat(0), Rat(0), h);            // cos60 = 1/2, sin60 = s3/2
    case 3:  return mk(Rat(0), Rat(0), Rat(1), Rat(0));  // i
    case 4:  return mk(-h, Rat(0), Rat(0), h);
    case 5:  return mk(Rat(0), -h, h, Rat(0));
    case 6:  return mk(Rat(-1), Rat(0), Rat(0), Rat(0));
    case 7:  return mk(Rat(0), -h, -h, Rat(0));
    case 8:  return mk(-h, Rat(0), Rat(0), -h);
    case 9:  return mk(Rat(0), Rat(0), Rat(-1), Rat(0));
    case 10: return mk(h, Rat(0), Rat(0), -h);
    default: return mk(Rat(0), h, -h, Rat(0));
  }
}

StructureCocycle structure_cocycle(const GroupoidPresentation& p) {
  return structure_cocycle(p, invariant_gram(p, RatMat::identity(p.base.dim)));
}

StructureCocycle structure_cocycle(const GroupoidPresentation& p, const RatMat& gram) {
  if (gram.n != p.base.dim) throw MetricMissing("no invariant metric attached");
  StructureCocycle sc;
  sc.gram = gram;
  sc.chart_sign.assign(p.charts.size(), 0);
  sc.det_sign.resize(p.components.size());

  auto L = exact_cholesky(gram);
  if (!L) throw std::runtime_error("metric Cholesky factor leaves Q(sqrt3)");
  sc.exact = true;
  sc.frame = L->adjoint();  // real entries: transpose
  sc.frame_inv = invert_upper(sc.frame);

  sc.value.reserve(p.components.size());
  for (const auto& comp : p.components) {
    ExactMat r = sc.frame * exact_from_imat(comp.germ.a) * sc.frame_inv;
    if (!(r.adjoint() * r == ExactMat::identity(p.base.dim)))
      throw std::runtime_error("structure cocycle value is not orthogonal");
    sc.value.push_back(std::move(r));
    sc.det_sign[comp.id] = comp.germ.a.det() > 0 ? 1 : -1;
  }

  Nerve nerve = Nerve::build(p);
  for (auto [second, first] : nerve.pairs) {
    int c = p.compose(second, first);
    if (!(sc.value[second] * sc.value[first] == sc.value[c]))
      throw std::runtime_error("structure cocycle fails multiplicativity");
  }
  return sc;
}

ObstructionVerdict w1(const GroupoidPresentation& p, const StructureCocycle& g) {
  gf2::Gf2System sys(int(p.charts.size()));
  for (const auto& comp : p.components)
    sys.add_row({comp.src, comp.tgt}, g.det_sign[comp.id] < 0);
  auto res = sys.solve();
  ObstructionVerdict v;
  v.rank = res.rank;
  v.unknowns = int(p.charts.size());
  v.trivial = res.solvable;
  if (res.solvable) {
    v.witness.degree = 0;
    v.witness.values = res.witness;
  } else {
    v.certificate = res.certificate;
  }
  return v;
}

std::optional<std::vector<uint8_t>> w1_exhaustive(const GroupoidPresentation& p,
                                                  const StructureCocycle& g) {
  gf2::Gf2System sys(int(p.charts.size()));
  for (const auto& comp : p.components)
    sys.add_row({comp.src, comp.tgt}, g.det_sign[comp.id] < 0);
  return sys.exhaustive_solve();
}

StructureCocycle orient(const GroupoidPresentation& p, const StructureCocycle& g,
                        const Z2Cochain& w1_witness) {
  if (w1_witness.degree != 0 || w1_witness.values.size() != p.charts.size())
    throw NotOrientable("orientation witness missing");
  StructureCocycle so = g;
  so.oriented = true;
  for (size_t a = 0; a < p.charts.size(); ++a)
    so.chart_sign[a] = w1_witness.values[a];

  const int n = p.base.dim;
  ExactMat flip = ExactMat::identity(n);
  flip.at(0, 0) = ExactC(Rat(-1));
  for (const auto& comp : p.components) {
    ExactMat r = g.value[comp.id];
    if (so.chart_sign[comp.tgt]) r = flip * r;
    if (so.chart_sign[comp.src]) r = r * flip;
    so.value[comp.id] = r;
    int d = g.det_sign[comp.id];
    if (so.chart_sign[comp.src] ^ so.chart_sign[comp.tgt]) d = -d;
    so.det_sign[comp.id] = d;
    if (d != 1)
      throw NotOrientable("component " + std::to_string(comp.id) +
                          " has negative determinant after gauge");
  }

  if (n == 2) {
    so.turn.resize(p.components.size());
    for (const auto& comp : p.components) {
      bool matched = false;
      for (int k = 0; k < 12 && !matched; ++k) {
        Rat u(k, 12);
        ExactC e = exactc_of_turn(u);
        ExactMat rot(2);
        rot.at(0, 0) = ExactC{e.a, e.b, Rat(0), Rat(0)};
        rot.at(1, 1) = rot.at(0, 0);
        rot.at(1, 0) = ExactC{e.c, e.d, Rat(0), Rat(0)};
        rot.at(0, 1) = -rot.at(1, 0);
        if (so.value[comp.id] == rot) {
          so.turn[comp.id] = u;
          matched = true;
        }
      }
      if (!matched)
        throw std::runtime_error("gauged rotation is not crystallographic");
    }
  } else if (n == 1) {
    so.turn.assign(p.components.size(), Rat(0));
  }
  return so;
}

namespace {

// Spin defect exponent on a composable pair, n == 2: turn(tau) + turn(sigma)
// - turn(tau sigma) is exactly 0 or 1; the half-turn lift picks up (-1)^k.
int pair_defect_exponent(const StructureCocycle& so, int second, int first, int comp) {
  Rat k = so.turn[second] + so.turn[first] - so.turn[comp];
  if (!k.is_integer()) throw std::runtime_error("turn cocycle not exact");
  long long v = k.num();
  if (v != 0 && v != 1) throw std::runtime_error("unexpected defect exponent");
  return int(v);
}

}  // namespace

EvenCliff3 operator*(const EvenCliff3& x, const EvenCliff3& y) {
  // basis monomials as gamma bitmasks; 0 -> 1, 1 -> g1g2, 2 -> g1g3, 3 -> g2g3
  static const int mask[4] = {0, 0b011, 0b101, 0b110};
  auto mul_mono = [&](int mi, int mj, int& sign) {
    int a = mask[mi], b = mask[mj];
    sign = 1;
    for (int j = 2; j >= 0; --j) {
      if (!(b & (1 << j))) continue;
      int higher = a & ~((1 << (j + 1)) - 1);
      sign *= (__builtin_popcount(higher) % 2) ? -1 : 1;
    }
    int res = a ^ b;
    for (int m = 0; m < 4; ++m)
      if (mask[m] == res) return m;
    throw std::logic_error("even Clifford product left the even part");
  };
  EvenCliff3 z;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (x.c[i].is_zero() || y.c[j].is_zero()) continue;
      int sign;
      int m = mul_mono(i, j, sign);
      QSqrt2 term = x.c[i] * y.c[j];
      z.c[m] = (sign > 0) ? z.c[m] + term : z.c[m] - term;
    }
  return z;
}

namespace {

EvenCliff3 reverse3(const EvenCliff3& x) {
  EvenCliff3 r = x;
  for (int i = 1; i < 4; ++i) r.c[i] = -r.c[i];  // bivectors reverse to minus
  return r;
}

// Odd part over basis {g1, g2, g3, g1g2g3}; needed for the adjoint action.
struct OddCliff3 {
  std::array<QSqrt2, 4> c{};
};

int mono_product(int a, int b, int& sign) {
  sign = 1;
  for (int j = 2; j >= 0; --j) {
    if (!(b & (1 << j))) continue;
    int higher = a & ~((1 << (j + 1)) - 1);
    sign *= (__builtin_popcount(higher) % 2) ? -1 : 1;
  }
  return a ^ b;
}

OddCliff3 mul_even_odd(const EvenCliff3& e, const OddCliff3& o, bool odd_left) {
  static const int emask[4] = {0, 0b011, 0b101, 0b110};
  static const int omask[4] = {0b001, 0b010, 0b100, 0b111};
  OddCliff3 z;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (e.c[i].is_zero() || o.c[j].is_zero()) continue;
      int sign;
      int res = odd_left ? mono_product(omask[j], emask[i], sign)
                         : mono_product(emask[i], omask[j], sign);
      QSqrt2 term = e.c[i] * o.c[j];
      int m = -1;
      for (int k = 0; k < 4; ++k)
        if (omask[k] == res) m = k;
      if (m < 0) throw std::logic_error("odd product misclassified");
      z.c[m] = (sign > 0) ? z.c[m] + term : z.c[m] - term;
    }
  return z;
}

// Ad(e) gamma_k = e gamma_k reverse(e) for unit even e; returns SO(3) entries.
std::array<std::array<QSqrt2, 3>, 3> adjoint_so3(const EvenCliff3& e) {
  std::array<std::array<QSqrt2, 3>, 3> m{};
  EvenCliff3 rev = reverse3(e);
  for (int k = 0; k < 3; ++k) {
    OddCliff3 g;
    g.c[k] = QSqrt2(Rat(1));
    OddCliff3 t = mul_even_odd(e, g, /*odd_left=*/false);   // e * gamma_k
    OddCliff3 u = mul_even_odd(rev, t, /*odd_left=*/true);  // (e gamma_k) * rev
    for (int r = 0; r < 3; ++r) m[r][k] = u.c[r];
    if (!u.c[3].is_zero()) throw std::logic_error("adjoint left the vector space");
  }
  return m;
}

// Canonical lift of a signed-permutation rotation by lexicographic
// quarter-turn factors (1 + g_a g_b)/sqrt2.
EvenCliff3 lift_signed_perm(const IMat& r) {
  const int n = r.n;
  IMat m = r;
  std::vector<std::pair<std::pair<int, int>, int>> turns;
  for (int i = 0; i < n; ++i) {
    int k = -1;
    for (int row = 0; row < n; ++row)
      if (m.at(row, i) != 0) k = row;
    if (k != i) {
      IMat q = IMat::identity(n);
      q.at(i, i) = 0; q.at(k, k) = 0;
      q.at(i, k) = 1; q.at(k, i) = -1;  // e_k -> e_i, e_i -> -e_k
      m = q * m;
      turns.push_back({{i, k}, 1});
    }
  }
  for (int i = 0; i < n; ++i) {
    if (m.at(i, i) == 1) continue;
    int j = -1;
    for (int k2 = i + 1; k2 < n; ++k2)
      if (m.at(k2, k2) == -1) { j = k2; break; }
    if (j < 0) throw std::logic_error("odd number of sign flips in SO matrix");
    IMat q = IMat::identity(n);
    q.at(i, i) = -1; q.at(j, j) = -1;
    m = q * m;
    turns.push_back({{i, j}, 2});
  }
  if (!(m == IMat::identity(n))) throw std::logic_error("factorization failed");

  // r = q_1^{-1} q_2^{-1} ... in application order; lift factors likewise.
  auto quarter_lift = [&](int a, int b) {
    EvenCliff3 e;
    e.c[0] = QSqrt2(Rat(0), Rat(1, 2));  // 1/sqrt2 = sqrt2/2
    static const int slot[3][3] = {{-1, 1, 2}, {1, -1, 3}, {2, 3, -1}};
    int lo = std::min(a, b), hi = std::max(a, b);
    int s = slot[lo][hi];
    QSqrt2 coeff(Rat(0), Rat(1, 2));
    if (a > b) coeff = -coeff;  // orientation of the plane (a,b)
    e.c[s] = coeff;
    return e;
  };
  // Q_k ... Q_1 R = I, so R = Q_1^{-1} ... Q_k^{-1}; lifts compose the same way
  // and the inverse of a unit even element is its reversal.
  EvenCliff3 lift = EvenCliff3::one();
  for (const auto& [plane, count] : turns) {
    EvenCliff3 inv = reverse3(quarter_lift(plane.first, plane.second));
    for (int c = 0; c < count; ++c) lift = lift * inv;
  }
  auto ad = adjoint_so3(lift);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (!(ad[i][j] == QSqrt2(Rat(r.at(i, j)))))
        throw std::logic_error("signed-permutation lift adjoint mismatch");
  return lift;
}

}  // namespace

SpinResult spin_lift(const GroupoidPresentation& p, const StructureCocycle& so) {
  if (!so.oriented) throw NotReduced("spin lift needs the SO-reduced cocycle");
  const int n = p.base.dim;
  Nerve nerve = Nerve::build(p);

  SpinStructure s;
  s.n = n;
  s.twist.assign(p.components.size(), 0);

  if (n == 1) {
    // SO_1 is trivial: the spinor bundle is the trivial complex line.
    s.half_turn.assign(p.components.size(), Rat(0));
    s.phase.assign(p.components.size(), Rat(0));
    s.epsilon.assign(p.components.size(), 0);
    return s;
  }

  if (n == 2) {
    gf2::Gf2System sys(int(p.components.size()));
    for (auto [second, first] : nerve.pairs) {
      int comp = p.compose(second, first);
      int k = pair_defect_exponent(so, second, first, comp);
      sys.add_row({second, first, comp}, k);
    }
    auto res = sys.solve();
    if (!res.solvable) {
      ObstructionVerdict v;
      v.trivial = false;
      v.certificate = res.certificate;
      v.rank = res.rank;
      v.unknowns = int(p.components.size());
      return v;
    }
    // prefer a witness that is constant per group element: the descended
    // Dirac machinery needs a single spin value per germ
    {
      bool turns_constant = true;
      std::vector<std::optional<Rat>> tg(p.group.size());
      for (const auto& comp : p.components) {
        auto& t = tg[comp.group_index];
        if (!t) t = so.turn[comp.id];
        else if (!(*t == so.turn[comp.id])) turns_constant = false;
      }
      if (turns_constant) {
        std::vector<uint8_t> grp(p.group.size(), 2);  // 2 = unassigned
        gf2::Gf2System gsys(int(p.group.size()));
        for (auto [second, first] : nerve.pairs) {
          int comp = p.compose(second, first);
          int k = pair_defect_exponent(so, second, first, comp);
          gsys.add_row({p.components[second].group_index,
                        p.components[first].group_index,
                        p.components[comp].group_index},
                       k);
        }
        auto gres = gsys.solve();
        if (gres.solvable) {
          std::vector<uint8_t> expanded(p.components.size());
          for (const auto& comp : p.components)
            expanded[comp.id] = gres.witness[comp.group_index];
          if (sys.check(expanded)) res.witness = expanded;
        }
        (void)grp;
      }
    }
    s.epsilon = res.witness;
    s.half_turn.resize(p.components.size());
    s.phase.assign(p.components.size(), Rat(0));
    for (const auto& comp : p.components) {
      Rat t = so.turn[comp.id] / Rat(2);
      if (res.witness[comp.id]) t = (t + Rat(1, 2)).mod1();
      s.half_turn[comp.id] = t;
    }
    if (!spin_is_multiplicative(p, s))
      throw std::logic_error("corrected lift is not multiplicative");
    return s;
  }

  if (n == 3) {
    std::vector<EvenCliff3> canon(p.components.size());
    for (const auto& comp : p.components) {
      IMat r(3);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          ExactC e = so.value[comp.id].at(i, j);
          if (!e.b.is_zero() || !e.c.is_zero() || !e.d.is_zero() || !e.a.is_integer())
            throw UnsupportedDim("n=3 spin lift requires signed-permutation cocycles");
          r.at(i, j) = e.a.num();
        }
      canon[comp.id] = lift_signed_perm(r);
    }
    gf2::Gf2System sys(int(p.components.size()));
    for (auto [second, first] : nerve.pairs) {
      int comp = p.compose(second, first);
      EvenCliff3 prod = canon[second] * canon[first];
      int k;
      if (prod == canon[comp]) k = 0;
      else if (prod == -canon[comp]) k = 1;
      else throw std::logic_error("n=3 defect is not a sign");
      sys.add_row({second, first, comp}, k);
    }
    auto res = sys.solve();
    if (!res.solvable) {
      ObstructionVerdict v;
      v.trivial = false;
      v.certificate = res.certificate;
      v.rank = res.rank;
      v.unknowns = int(p.components.size());
      return v;
    }
    s.epsilon = res.witness;
    s.even.resize(p.components.size());
    for (const auto& comp : p.components)
      s.even[comp.id] = res.witness[comp.id] ? -canon[comp.id] : canon[comp.id];
    if (!spin_is_multiplicative(p, s))
      throw std::logic_error("corrected n=3 lift is not multiplicative");
    return s;
  }
  throw UnsupportedDim("spin lift supports n in {1,2,3}");
}

std::optional<bool> w2_group_exhaustive(const GroupoidPresentation& p,
                                        const StructureCocycle& so) {
  if (p.base.dim != 2 || p.group.size() > 20) return std::nullopt;
  std::vector<std::optional<Rat>> turn_of_group(p.group.size());
  for (const auto& comp : p.components) {
    auto& t = turn_of_group[comp.group_index];
    if (!t) t = so.turn[comp.id];
    else if (!(*t == so.turn[comp.id])) return std::nullopt;
  }
  auto mult = [&](int g, int h) {
    IMat a = p.group[g].a * p.group[h].a;
    RatVec b = p.group[g].a * p.group[h].b;
    for (int i = 0; i < p.base.dim; ++i) b[i] = (b[i] + p.group[g].b[i]).mod1();
    for (size_t k = 0; k < p.group.size(); ++k)
      if (p.group[k].a == a && p.group[k].b == b) return int(k);
    throw std::logic_error("group not closed");
  };
  auto grp_defect = [&](int g, int h) {
    Rat k = *turn_of_group[g] + *turn_of_group[h] - *turn_of_group[mult(g, h)];
    return int(k.num() % 2);
  };
  Nerve nerve = Nerve::build(p);
  for (auto [second, first] : nerve.pairs) {
    int comp = p.compose(second, first);
    int k = pair_defect_exponent(so, second, first, comp);
    if (k != grp_defect(p.components[second].group_index,
                        p.components[first].group_index))
      return std::nullopt;
  }
  const uint32_t lim = uint32_t(1) << p.group.size();
  for (uint32_t mask = 0; mask < lim; ++mask) {
    if ((mask & 1) != 0) continue;  // the identity keeps lift +1
    bool ok = true;
    for (size_t g = 0; g < p.group.size() && ok; ++g)
      for (size_t h = 0; h < p.group.size() && ok; ++h) {
        int lhs = int(((mask >> g) & 1) ^ ((mask >> h) & 1) ^
                      ((mask >> mult(int(g), int(h))) & 1));
        if (lhs != grp_defect(int(g), int(h))) ok = false;
      }
    if (ok) return true;
  }
  return false;
}

SpinResult projective_lift(const GroupoidPresentation& p, const StructureCocycle& so) {
  if (p.base.dim != 2) throw UnsupportedDim("projective lifts implemented for n=2");
  if (!so.oriented) throw NotReduced("projective lift needs the SO-reduced cocycle");
  Nerve nerve = Nerve::build(p);
  for (int modulus : {4, 8, 12, 24}) {
    gf2::ModSystem sys(int(p.components.size()), modulus);
    for (auto [second, first] : nerve.pairs) {
      int comp = p.compose(second, first);
      int k = pair_defect_exponent(so, second, first, comp);
      sys.add_row({{second, 1}, {first, 1}, {comp, -1}}, -k * modulus / 2);
    }
    auto sol = sys.solve();
    if (!sol) continue;
    // as in the spin case, prefer phases constant per group element
    {
      gf2::ModSystem gsys(int(p.group.size()), modulus);
      for (auto [second, first] : nerve.pairs) {
        int comp = p.compose(second, first);
        int k = pair_defect_exponent(so, second, first, comp);
        gsys.add_row({{p.components[second].group_index, 1},
                      {p.components[first].group_index, 1},
                      {p.components[comp].group_index, -1}},
                     -k * modulus / 2);
      }
      auto gsol = gsys.solve();
      if (gsol) {
        std::vector<int> expanded(p.components.size());
        for (const auto& comp : p.components)
          expanded[comp.id] = (*gsol)[comp.group_index];
        if (sys.check(expanded)) *sol = expanded;
      }
    }
    SpinStructure s;
    s.n = 2;
    s.projective = true;
    s.phase_modulus = modulus;
    s.twist.assign(p.components.size(), 0);
    s.epsilon.assign(p.components.size(), 0);
    s.half_turn.resize(p.components.size());
    s.phase.resize(p.components.size());
    for (const auto& comp : p.components) {
      s.half_turn[comp.id] = so.turn[comp.id] / Rat(2);
      s.phase[comp.id] = Rat((*sol)[comp.id], modulus).mod1();
    }
    if (!spin_is_multiplicative(p, s))
      throw std::logic_error("projective lift is not multiplicative");
    return s;
  }
  ObstructionVerdict v;
  v.trivial = false;
  v.unknowns = int(p.components.size());
  return v;
}

ObstructionVerdict cohomologous(const GroupoidPresentation& p, const Z2Cochain& c1,
                                const Z2Cochain& c2) {
  if (c1.degree != 1 || c2.degree != 1)
    throw std::domain_error("cohomologous expects degree-1 cochains");
  gf2::Gf2System sys(int(p.charts.size()));
  for (const auto& comp : p.components)
    sys.add_row({comp.src, comp.tgt},
                (c1.values[comp.id] ^ c2.values[comp.id]) != 0);
  auto res = sys.solve();
  ObstructionVerdict v;
  v.trivial = res.solvable;
  v.rank = res.rank;
  v.unknowns = int(p.charts.size());
  if (res.solvable) {
    v.witness.degree = 0;
    v.witness.values = res.witness;
  } else {
    v.certificate = res.certificate;
  }
  return v;
}

std::vector<Z2Cochain> h1_z2_classes(const GroupoidPresentation& p) {
  Nerve nerve = Nerve::build(p);
  const int nc = int(p.components.size());
  gf2::Gf2System cocycle_sys(nc);
  for (auto [second, first] : nerve.pairs) {
    int comp = p.compose(second, first);
    cocycle_sys.add_row({second, first, comp}, 0);
  }
  auto kernel = cocycle_sys.kernel_basis();

  std::vector<std::vector<uint8_t>> cobound;
  for (size_t a = 0; a < p.charts.size(); ++a) {
    std::vector<uint8_t> v(nc, 0);
    for (const auto& comp : p.components)
      v[comp.id] = uint8_t((comp.src == int(a)) ^ (comp.tgt == int(a)));
    cobound.push_back(std::move(v));
  }

  std::vector<gf2::BitRow> basis_rows;
  auto to_row = [&](const std::vector<uint8_t>& v) {
    gf2::BitRow r(nc);
    for (int i = 0; i < nc; ++i)
      if (v[i]) r.set(i);
    return r;
  };
  auto reduce = [&](gf2::BitRow r) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& b : basis_rows) {
        int lead = b.first_set(nc);
        if (lead >= 0 && r.get(lead)) { r ^= b; changed = true; }
      }
    }
    return r;
  };
  for (const auto& v : cobound) {
    gf2::BitRow r = reduce(to_row(v));
    if (r.any()) basis_rows.push_back(r);
  }
  std::vector<std::vector<uint8_t>> class_basis;
  for (const auto& v : kernel) {
    gf2::BitRow r = reduce(to_row(v));
    if (r.any()) {
      basis_rows.push_back(r);
      class_basis.push_back(v);
    }
  }

  std::vector<Z2Cochain> classes;
  size_t count = class_basis.size() <= 6 ? (size_t(1) << class_basis.size())
                                         : class_basis.size() + 1;
  for (size_t mask = 0; mask < count; ++mask) {
    Z2Cochain c;
    c.degree = 1;
    c.values.assign(nc, 0);
    if (class_basis.size() <= 6) {
      for (size_t b = 0; b < class_basis.size(); ++b)
        if ((mask >> b) & 1)
          for (int i = 0; i < nc; ++i) c.values[i] ^= class_basis[b][i];
    } else if (mask > 0) {
      for (int i = 0; i < nc; ++i) c.values[i] = class_basis[mask - 1][i];
    }
    classes.push_back(std::move(c));
  }
  return classes;
}

bool spin_is_multiplicative(const GroupoidPresentation& p, const SpinStructure& s) {
  Nerve nerve = Nerve::build(p);
  for (auto [second, first] : nerve.pairs) {
    int comp = p.compose(second, first);
    if (s.n == 3) {
      EvenCliff3 prod = s.even[second] * s.even[first];
      EvenCliff3 expect = s.even[comp];
      if (!s.twist.empty() && (s.twist[second] ^ s.twist[first] ^ s.twist[comp]))
        expect = -expect;
      if (!(prod == expect)) return false;
    } else {
      Rat lhs = (s.half_turn[second] + s.phase[second] + s.half_turn[first] +
                 s.phase[first]).mod1();
      Rat rhs = (s.half_turn[comp] + s.phase[comp]).mod1();
      if (!s.twist.empty() && (s.twist[second] ^ s.twist[first] ^ s.twist[comp]))
        rhs = (rhs + Rat(1, 2)).mod1();
      if (!(lhs == rhs)) return false;
    }
  }
  return true;
}

}  // namespace etale::cohomology
