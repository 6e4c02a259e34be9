#include "etale/groupoid.hpp"

#include <algorithm>
#include <functional>

namespace etale::groupoid {

namespace {

RatVec mod1(const RatVec& x) {
  RatVec y(x.n);
  for (int i = 0; i < x.n; ++i) y[i] = x[i].mod1();
  return y;
}

GroupElem compose_elems(const GroupElem& g2, const GroupElem& g1) {
  GroupElem g;
  g.a = g2.a * g1.a;
  RatVec t = g2.a * g1.b;
  for (int i = 0; i < t.n; ++i) t[i] += g2.b[i];
  g.b = mod1(t);
  return g;
}

// Axis box endpoints in absolute (unwrapped) coordinates, snapped to the grid.
struct AxisBox {
  Rat lo, hi;
};

AxisBox axis_box(int m, const Rat& f, int grid_n, int i) {
  auto snap = [&](const Rat& v) {
    // round to nearest grid multiple
    Rat scaled = v * Rat(grid_n);
    long long fl = scaled.floor();
    Rat frac = scaled - Rat(fl);
    long long k = (frac < Rat(1, 2)) ? fl : fl + 1;
    return Rat(k, grid_n);
  };
  Rat lo = (Rat(i) - f / Rat(2)) / Rat(m);
  Rat hi = (Rat(i + 1) + f / Rat(2)) / Rat(m);
  return {snap(lo), snap(hi)};
}

struct GermKey {
  int src, tgt;
  IMat a;
  RatVec c;
  bool operator==(const GermKey& o) const {
    return src == o.src && tgt == o.tgt && a == o.a && c == o.c;
  }
};

struct GermKeyHash {
  size_t operator()(const GermKey& k) const {
    size_t h = std::hash<long long>()(((long long)k.src << 20) ^ k.tgt);
    for (int i = 0; i < k.a.n; ++i)
      for (int j = 0; j < k.a.n; ++j)
        h = h * 1315423911u + std::hash<long long>()(k.a.at(i, j));
    for (int i = 0; i < k.c.n; ++i) {
      h = h * 2654435761u + std::hash<long long>()(k.c[i].num());
      h = h * 97531u + std::hash<long long>()(k.c[i].den());
    }
    return h;
  }
};

}  // namespace

std::vector<GroupElem> close_group(const std::vector<GroupElem>& gens, int dim,
                                   int bound) {
  GroupElem id;
  id.a = IMat::identity(dim);
  id.b = RatVec(dim);
  std::vector<GroupElem> elems{id};
  std::vector<GroupElem> frontier{id};
  while (!frontier.empty()) {
    std::vector<GroupElem> next;
    for (const auto& e : frontier)
      for (const auto& g : gens) {
        GroupElem c = compose_elems(g, e);
        if (std::find(elems.begin(), elems.end(), c) == elems.end()) {
          elems.push_back(c);
          next.push_back(c);
          if (static_cast<int>(elems.size()) > bound)
            throw NonFiniteGroup("group closure exceeds bound " + std::to_string(bound));
        }
      }
    frontier = std::move(next);
  }
  return elems;
}

Rat bump_value(const GroupoidPresentation& p, int chart, const RatVec& lift,
               BumpKind kind) {
  const int m = p.boxes_per_axis;
  const int n = p.base.dim;
  IVec multi(n);
  {
    int c = p.charts[chart].id;
    for (int i = 0; i < n; ++i) { multi[i] = c % m; c /= m; }
  }
  auto ramp = [&](const Rat& t) {
    if (kind == BumpKind::Tent) return t;
    return t * t * (Rat(3) - Rat(2) * t);  // smoothstep, complementary too
  };
  Rat value(1);
  for (int i = 0; i < n; ++i) {
    AxisBox box = axis_box(m, p.overlap, p.base.grid_n, int(multi[i]));
    AxisBox prev = axis_box(m, p.overlap, p.base.grid_n, int((multi[i] + m - 1) % m));
    AxisBox next = axis_box(m, p.overlap, p.base.grid_n, int((multi[i] + 1) % m));
    if (multi[i] == 0) { prev.lo -= Rat(1); prev.hi -= Rat(1); }
    if (multi[i] == m - 1) { next.lo += Rat(1); next.hi += Rat(1); }
    // translate the canonical-lift coordinate into this axis box's frame
    Rat u = box.lo + (lift[i] - p.charts[chart].box.lo[i]);
    Rat axis_val;
    if (u < box.lo || u > box.hi) {
      axis_val = Rat(0);
    } else if (u < prev.hi) {
      axis_val = ramp((u - box.lo) / (prev.hi - box.lo));
    } else if (u > next.lo) {
      axis_val = ramp((box.hi - u) / (box.hi - next.lo));
    } else {
      axis_val = Rat(1);
    }
    value *= axis_val;
  }
  return value;
}

namespace {

// Enumerate (global index, lift) pairs of the grid points of a chart.
void for_chart_points(const GroupoidPresentation& p, int chart,
                      const std::function<void(size_t, const RatVec&)>& fn) {
  const int n = p.base.dim;
  const int N = p.base.grid_n;
  const Box& box = p.charts[chart].box;
  std::array<long long, kMaxDim> klo{}, khi{};
  for (int i = 0; i < n; ++i) {
    Rat lo = box.lo[i] * Rat(N), hi = box.hi[i] * Rat(N);
    klo[i] = lo.floor() + (lo.is_integer() ? 0 : 1);
    khi[i] = hi.floor();
  }
  IVec k(n);
  std::function<void(int)> rec = [&](int axis) {
    if (axis == n) {
      RatVec lift(n);
      IVec j(n);
      for (int i = 0; i < n; ++i) {
        lift[i] = Rat(k[i], N);
        j[i] = ((k[i] % N) + N) % N;
      }
      fn(p.flat(j), lift);
      return;
    }
    for (long long t = klo[axis]; t <= khi[axis]; ++t) { k[axis] = t; rec(axis + 1); }
  };
  rec(0);
}

}  // namespace

GroupoidPresentation build_quotient_presentation(const std::vector<GroupElem>& generators,
                                                 const FlatBase& base_in,
                                                 const CoverParams& cover) {
  GroupoidPresentation p;
  p.base = base_in;
  const int n = p.base.dim;
  const int N = p.base.grid_n;
  if (n < 1 || n > kMaxDim) throw BuildError("dim must be 1..3");
  if (N < 8) throw BuildError("grid_N must be >= 8");
  if (p.base.gram.n == 0) {
    if (p.base.lattice_basis.n == n)
      p.base.gram = p.base.lattice_basis.transpose() * p.base.lattice_basis;
    else
      p.base.gram = RatMat::identity(n);
  }
  if (p.base.lattice_basis.n == 0) p.base.lattice_basis = RatMat::identity(n);
  if (p.base.lattice_basis.det().is_zero()) throw BuildError("lattice_basis singular");

  for (const auto& g : generators) {
    long long d = g.a.det();
    if (d != 1 && d != -1) throw BuildError("generator matrix is not lattice-preserving");
    for (int i = 0; i < n; ++i) {
      Rat t = g.b[i] * Rat(N);
      if (!t.is_integer())
        throw GridIncompatible("generator translation denominator does not divide grid_N");
    }
  }
  p.group = close_group(generators, n);

  if (!(cover.overlap > Rat(0)) || !(cover.overlap < Rat(1, 2)))
    throw BuildError("overlap fraction must lie in (0, 1/2)");
  p.overlap = cover.overlap;
  int m = cover.boxes_per_axis;
  if (m == 0) m = 3;
  if (m < 3) throw BuildError("need at least 3 boxes per axis");
  p.boxes_per_axis = m;

  // charts = product of snapped axis boxes
  int nch = 1;
  for (int i = 0; i < n; ++i) nch *= m;
  for (int cid = 0; cid < nch; ++cid) {
    Chart ch;
    ch.id = cid;
    ch.box.lo = RatVec(n);
    ch.box.hi = RatVec(n);
    int c = cid;
    for (int i = 0; i < n; ++i) {
      AxisBox ab = axis_box(m, p.overlap, N, c % m);
      Rat side = ab.hi - ab.lo;
      if (!(side < Rat(1, 2)))
        throw BuildError("box side must be smaller than half a period; raise boxes_per_axis");
      Rat lo = ab.lo.mod1();
      ch.box.lo[i] = lo;
      ch.box.hi[i] = lo + side;
      c /= m;
    }
    p.charts.push_back(ch);
  }
  // plateau sanity: consecutive overlaps must not touch
  for (int i = 0; i + 2 < m; ++i) {
    AxisBox a = axis_box(m, p.overlap, N, i);
    AxisBox b = axis_box(m, p.overlap, N, i + 2);
    if (!(a.hi < b.lo)) throw BuildError("overlap too large: non-adjacent boxes meet");
  }

  // components
  const size_t npts = p.grid_points();
  std::unordered_map<GermKey, int, GermKeyHash> comp_index;
  for (int a = 0; a < nch; ++a) {
    for (size_t gi = 0; gi < p.group.size(); ++gi) {
      const GroupElem& g = p.group[gi];
      for_chart_points(p, a, [&](size_t xidx, const RatVec& lift) {
        RatVec y = g.a * lift;
        for (int i = 0; i < n; ++i) y[i] += g.b[i];
        for (int b = 0; b < nch; ++b) {
          auto ylift = p.lift_into(mod1(y), p.charts[b].box);
          if (!ylift) continue;
          RatVec c(n);
          for (int i = 0; i < n; ++i) c[i] = g.b[i] + (*ylift)[i] - y[i];
          GermKey key{a, b, g.a, c};
          auto it = comp_index.find(key);
          int id;
          if (it == comp_index.end()) {
            id = static_cast<int>(p.components.size());
            comp_index.emplace(key, id);
            ArrowComponent comp;
            comp.id = id;
            comp.src = a;
            comp.tgt = b;
            comp.germ.a = g.a;
            comp.germ.c = c;
            comp.group_index = static_cast<int>(gi);
            p.components.push_back(comp);
            p.support.emplace_back(npts);
            p.image.emplace_back(npts);
          } else {
            id = it->second;
          }
          p.support[id].set(xidx);
          p.image[id].set(p.torus_grid_index(mod1(y)));
        }
      });
    }
  }

  // inverses
  p.inverse.assign(p.components.size(), -1);
  for (const auto& comp : p.components) {
    AffineGerm inv = comp.germ.inverse();
    GermKey key{comp.tgt, comp.src, inv.a, inv.c};
    auto it = comp_index.find(key);
    if (it == comp_index.end()) throw BuildError("inverse component missing");
    p.inverse[comp.id] = it->second;
  }

  // composition table
  std::vector<std::vector<int>> by_src(nch);
  for (const auto& comp : p.components) by_src[comp.src].push_back(comp.id);
  for (const auto& first : p.components) {
    for (int second_id : by_src[first.tgt]) {
      if (!p.image[first.id].intersects(p.support[second_id])) continue;
      const auto& second = p.components[second_id];
      AffineGerm g = second.germ.after(first.germ);
      GermKey key{first.src, second.tgt, g.a, g.c};
      auto it = comp_index.find(key);
      if (it == comp_index.end()) throw BuildError("composition table not closed");
      p.compose_table[(uint64_t(second_id) << 32) | uint32_t(first.id)] = it->second;
    }
  }

  // units over chart overlaps
  for (const auto& comp : p.components) {
    if (p.is_unit(comp.id))
      p.unit_table[(uint64_t(comp.src) << 32) | uint32_t(comp.tgt)] = comp.id;
  }
  return p;
}

ValidationReport validate(const GroupoidPresentation& p) {
  ValidationReport rep;

  {
    CheckResult c{"associativity", true, ""};
    for (const auto& [key21, id21] : p.compose_table) {
      int first = int(key21 & 0xffffffffu);
      int second = int(key21 >> 32);
      // iterate all thirds composable with `second`
      for (const auto& comp3 : p.components) {
        if (comp3.src != p.components[second].tgt) continue;
        int id32 = p.compose(comp3.id, second);
        if (id32 < 0) continue;
        int left = p.compose(id32, first);
        int right = p.compose(comp3.id, id21);
        if (left >= 0 && right >= 0 && left != right) {
          c.pass = false;
          c.detail = "triple (" + std::to_string(comp3.id) + "," + std::to_string(second) +
                     "," + std::to_string(first) + ")";
          break;
        }
      }
      if (!c.pass) break;
    }
    rep.checks.push_back(c);
  }

  {
    CheckResult c{"unit_law", true, ""};
    for (const auto& comp : p.components) {
      auto u_src = p.unit_table.find((uint64_t(comp.src) << 32) | uint32_t(comp.src));
      auto u_tgt = p.unit_table.find((uint64_t(comp.tgt) << 32) | uint32_t(comp.tgt));
      if (u_src == p.unit_table.end() || u_tgt == p.unit_table.end()) {
        c.pass = false;
        c.detail = "missing unit for chart of component " + std::to_string(comp.id);
        break;
      }
      int r = p.compose(comp.id, u_src->second);
      int l = p.compose(u_tgt->second, comp.id);
      if (r != comp.id || l != comp.id) {
        c.pass = false;
        c.detail = "unit law fails at component " + std::to_string(comp.id);
        break;
      }
    }
    rep.checks.push_back(c);
  }

  {
    CheckResult c{"inverse_law", true, ""};
    for (const auto& comp : p.components) {
      int inv = (comp.id < int(p.inverse.size())) ? p.inverse[comp.id] : -1;
      if (inv < 0) {
        c.pass = false;
        c.detail = "component " + std::to_string(comp.id) + " has no inverse entry";
        break;
      }
      int right = p.compose(comp.id, inv);   // sigma after sigma^{-1} : tgt -> tgt
      int left = p.compose(inv, comp.id);    // sigma^{-1} after sigma : src -> src
      auto u_tgt = p.unit_table.find((uint64_t(comp.tgt) << 32) | uint32_t(comp.tgt));
      auto u_src = p.unit_table.find((uint64_t(comp.src) << 32) | uint32_t(comp.src));
      bool ok = u_tgt != p.unit_table.end() && u_src != p.unit_table.end() &&
                right == u_tgt->second && left == u_src->second;
      if (!ok) {
        c.pass = false;
        c.detail = "inverse law fails at component " + std::to_string(comp.id);
        break;
      }
    }
    rep.checks.push_back(c);
  }

  {
    CheckResult c{"properness", true, ""};
    size_t bound = p.group.size();
    for (int a = 0; a < int(p.charts.size()) && c.pass; ++a) {
      for_chart_points(p, a, [&](size_t xidx, const RatVec& lift) {
        if (!c.pass) return;
        size_t count = 0;
        for (const auto& comp : p.components) {
          if (comp.src != a || comp.tgt != a) continue;
          if (!p.support[comp.id].get(xidx)) continue;
          RatVec y = comp.germ.apply(lift);
          bool fixes = true;
          for (int i = 0; i < p.base.dim; ++i)
            if (!(y[i] - lift[i]).is_integer()) { fixes = false; break; }
          if (fixes) ++count;
        }
        if (count > bound) {
          c.pass = false;
          c.detail = "isotropy exceeds group order at grid " + std::to_string(xidx);
        }
      });
    }
    rep.checks.push_back(c);
  }

  {
    CheckResult c{"germ_constancy", true, ""};
    for (const auto& comp : p.components) {
      const GroupElem& g = p.group[comp.group_index];
      bool ok = true;
      for_chart_points(p, comp.src, [&](size_t xidx, const RatVec& lift) {
        if (!ok || !p.support[comp.id].get(xidx)) return;
        RatVec via_germ = comp.germ.apply(lift);
        RatVec via_group = g.a * lift;
        for (int i = 0; i < p.base.dim; ++i) via_group[i] += g.b[i];
        for (int i = 0; i < p.base.dim; ++i)
          if (!(via_germ[i] - via_group[i]).is_integer()) ok = false;
        // germ must land inside the target box lift as well
        if (ok && !p.charts[comp.tgt].box.contains_lift(via_germ)) ok = false;
      });
      if (!ok) {
        c.pass = false;
        c.detail = "germ of component " + std::to_string(comp.id) +
                   " does not reproduce its group element";
        break;
      }
    }
    rep.checks.push_back(c);
  }

  return rep;
}

std::vector<int> isotropy(const GroupoidPresentation& p, size_t grid_index) {
  RatVec x = p.grid_coord(grid_index);
  int chart = -1;
  for (int a = 0; a < int(p.charts.size()); ++a)
    if (p.lift_into(x, p.charts[a].box)) { chart = a; break; }
  if (chart < 0) return {};
  RatVec lift = *p.lift_into(x, p.charts[chart].box);
  std::vector<int> iso;
  for (const auto& comp : p.components) {
    if (comp.src != chart || comp.tgt != chart) continue;
    if (!p.support[comp.id].get(grid_index)) continue;
    RatVec y = comp.germ.apply(lift);
    bool fixes = true;
    for (int i = 0; i < p.base.dim; ++i)
      if (!(y[i] - lift[i]).is_integer()) { fixes = false; break; }
    if (fixes) iso.push_back(comp.id);
  }
  return iso;
}

CutoffWeights cutoff_weights(const GroupoidPresentation& p, BumpKind kind) {
  const int nch = static_cast<int>(p.charts.size());
  CutoffWeights cw;
  cw.values.resize(nch);
  cw.points.resize(nch);

  // T(z) = sum_b rho_b(z); W(x) = sum_g T(g x)
  auto T = [&](const RatVec& z) {
    Rat t(0);
    for (int b = 0; b < nch; ++b) {
      auto lift = p.lift_into(z, p.charts[b].box);
      if (lift) t += bump_value(p, b, *lift, kind);
    }
    return t;
  };
  auto W = [&](const RatVec& x) {
    Rat w(0);
    for (const auto& g : p.group) {
      RatVec y = g.a * x;
      for (int i = 0; i < p.base.dim; ++i) y[i] += g.b[i];
      w += T(mod1(y));
    }
    return w;
  };

  // cache W per global grid point (orbit-invariant, computed on demand)
  std::vector<Rat> wcache(p.grid_points(), Rat(-1));
  for (int a = 0; a < nch; ++a) {
    for_chart_points(p, a, [&](size_t xidx, const RatVec& lift) {
      if (wcache[xidx] == Rat(-1)) wcache[xidx] = W(p.grid_coord(xidx));
      if (wcache[xidx].is_zero()) throw DegenerateBump("fibre sum of bump vanishes");
      cw.points[a].push_back(xidx);
      cw.values[a].push_back(bump_value(p, a, lift, kind) / wcache[xidx]);
    });
  }
  return cw;
}

GroupoidPresentation refine_cover(const GroupoidPresentation& p, int factor) {
  CoverParams cover;
  cover.boxes_per_axis = p.boxes_per_axis * factor;
  cover.overlap = p.overlap;
  std::vector<GroupElem> gens(p.group.begin(), p.group.end());
  return build_quotient_presentation(gens, p.base, cover);
}

void chart_points_visit(const GroupoidPresentation& p, int chart,
                        const std::function<void(size_t, const RatVec&)>& fn) {
  for_chart_points(p, chart, fn);
}

}  // namespace etale::groupoid
