#include "etale/dirac.hpp"

#include <algorithm>
#include <map>
#include <random>

namespace etale::dirac {

using cohomology::Nerve;

std::pair<size_t, int> DiracSystem::step(size_t x, const IVec& dir, int orientation) const {
  IVec j = unflat(x);
  int sign = 1;
  for (int i = 0; i < n; ++i) {
    long long t = j[i] + orientation * dir[i];
    // each full wrap across the cut picks up the twist sign of that axis
    while (t < 0) { t += grid_n; sign *= boundary_sign[i]; }
    while (t >= grid_n) { t -= grid_n; sign *= boundary_sign[i]; }
    j[i] = t;
  }
  return {flat(j), sign};
}

kernels::Csr DiracSystem::to_csr() const {
  kernels::Csr m;
  m.n = dim;
  m.row_ptr.assign(dim + 1, 0);
  const int S = spinor_dim;
  std::vector<std::vector<std::pair<int, cplx>>> rows(dim);
  for (size_t x = 0; x < grid_points; ++x) {
    for (const auto& term : stencil) {
      auto [yp, sp] = step(x, term.direction, +1);
      auto [ym, sm] = step(x, term.direction, -1);
      for (int r = 0; r < S; ++r)
        for (int c = 0; c < S; ++c) {
          cplx v = term.coeff.at(r, c).to_complex();
          if (v == cplx(0.0, 0.0)) continue;
          rows[x * S + r].push_back({int(yp * S + c), double(sp) * v});
          rows[x * S + r].push_back({int(ym * S + c), -double(sm) * v});
        }
    }
  }
  for (int r = 0; r < dim; ++r) {
    auto& row = rows[r];
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<int, cplx>> merged;
    for (const auto& e : row) {
      if (!merged.empty() && merged.back().first == e.first)
        merged.back().second += e.second;
      else
        merged.push_back(e);
    }
    rows[r] = std::move(merged);
  }
  for (int r = 0; r < dim; ++r) m.row_ptr[r + 1] = m.row_ptr[r] + int(rows[r].size());
  m.col.reserve(m.row_ptr[dim]);
  m.val.reserve(m.row_ptr[dim]);
  for (int r = 0; r < dim; ++r)
    for (const auto& [c, v] : rows[r]) {
      m.col.push_back(c);
      m.val.push_back(v);
    }
  return m;
}

void DiracSystem::apply(const cplx* in, cplx* out, kernels::Exec exec) const {
  const int S = spinor_dim;
  const long long gp = (long long)grid_points;
  struct Leg {
    IVec dir;
    cplx c[2][2];
  };
  std::vector<Leg> legs;
  for (const auto& t : stencil) {
    Leg l;
    l.dir = t.direction;
    for (int r = 0; r < S; ++r)
      for (int c = 0; c < S; ++c) l.c[r][c] = t.coeff.at(r, c).to_complex();
    legs.push_back(l);
  }
  auto row_work = [&](long long x) {
    cplx acc[2] = {cplx(0, 0), cplx(0, 0)};
    for (const auto& l : legs) {
      auto [yp, sp] = step(size_t(x), l.dir, +1);
      auto [ym, sm] = step(size_t(x), l.dir, -1);
      for (int r = 0; r < S; ++r)
        for (int c = 0; c < S; ++c)
          acc[r] += l.c[r][c] * (double(sp) * in[yp * S + c] - double(sm) * in[ym * S + c]);
    }
    for (int r = 0; r < S; ++r) out[x * S + r] = acc[r];
  };
  if (exec == kernels::Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long long x = 0; x < gp; ++x) row_work(x);
  } else {
    for (long long x = 0; x < gp; ++x) row_work(x);
  }
}

void DiracSystem::apply(const std::vector<cplx>& in, std::vector<cplx>& out,
                        kernels::Exec exec) const {
  out.resize(dim);
  apply(in.data(), out.data(), exec);
}

void DiracSystem::apply_projector(const std::vector<cplx>& in, std::vector<cplx>& out,
                                  kernels::Exec exec) const {
  const int S = spinor_dim;
  out.assign(dim, cplx(0, 0));
  const double w = 1.0 / double(actions.size());
  std::vector<std::array<cplx, 4>> rho(actions.size());
  for (size_t g = 0; g < actions.size(); ++g)
    for (int r = 0; r < S; ++r)
      for (int c = 0; c < S; ++c)
        rho[g][r * 2 + c] = actions[g].rho_inv.at(r, c).to_complex();
  const long long gp = (long long)grid_points;
  auto row_work = [&](long long x) {
    for (size_t g = 0; g < actions.size(); ++g) {
      size_t y = actions[g].perm[x];
      for (int r = 0; r < S; ++r) {
        cplx acc(0, 0);
        for (int c = 0; c < S; ++c) acc += rho[g][r * 2 + c] * in[y * S + c];
        out[x * S + r] += w * acc;
      }
    }
  };
  if (exec == kernels::Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long long x = 0; x < gp; ++x) row_work(x);
  } else {
    for (long long x = 0; x < gp; ++x) row_work(x);
  }
}

void DiracSystem::apply_omega(const std::vector<cplx>& in, std::vector<cplx>& out) const {
  const int S = spinor_dim;
  out.resize(dim);
  for (size_t x = 0; x < grid_points; ++x)
    for (int r = 0; r < S; ++r) {
      cplx acc(0, 0);
      for (int c = 0; c < S; ++c) acc += omega.at(r, c).to_complex() * in[x * S + c];
      out[x * S + r] = acc;
    }
}

namespace {

// Direction orbit of the coordinate axes under the group linear parts,
// modulo sign; these are the stencil legs.
std::vector<IVec> direction_orbit(const GroupoidPresentation& p) {
  const int n = p.base.dim;
  std::vector<IVec> dirs;
  auto canon = [&](IVec v) {
    for (int i = n - 1; i >= 0; --i) {
      if (v[i] > 0) break;
      if (v[i] < 0) {
        for (int k = 0; k < n; ++k) v[k] = -v[k];
        break;
      }
    }
    return v;
  };
  auto push = [&](IVec v) {
    v = canon(v);
    for (const auto& d : dirs)
      if (d == v) return false;
    dirs.push_back(v);
    return true;
  };
  for (int i = 0; i < n; ++i) {
    IVec e(n);
    e[i] = 1;
    push(e);
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t k = 0; k < dirs.size(); ++k)
      for (const auto& g : p.group)
        if (push(g.a * dirs[k])) changed = true;
  }
  std::sort(dirs.begin(), dirs.end(), [&](const IVec& a, const IVec& b) {
    for (int i = 0; i < n; ++i)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  });
  return dirs;
}

// gamma-tilde(u) = gamma(L^{-1} u) in the Cholesky frame, exact.
ExactMat gamma_tilde(const StructureCocycle& so, const CliffordModule& cl,
                     const std::vector<ExactC>& u) {
  const int n = so.gram.n;
  ExactMat acc(cl.dim);
  for (int k = 0; k < n; ++k) {
    // (L^{-1} u)_k = sum_j frame_inv(j, k) u_j   [frame_inv = (L^T)^{-1}]
    ExactC comp;
    for (int j = 0; j < n; ++j) comp += so.frame_inv.at(j, k) * u[j];
    if (!comp.is_zero()) acc = acc + comp * cl.gamma[k];
  }
  return acc;
}

}  // namespace

DiracSystem assemble_dirac(const GroupoidPresentation& p, const StructureCocycle& so,
                           const SpinStructure& s, const CliffordModule& cl) {
  const int n = p.base.dim;
  if (n > 2) throw bundle::UnsupportedDim("the Dirac pipeline supports n in {1,2}");
  if (!so.oriented) throw NotOrientable("assemble_dirac needs the oriented cocycle");
  if (s.n != n) throw NotSpin("spin structure dimension mismatch");

  DiracSystem sys;
  sys.n = n;
  sys.grid_n = p.base.grid_n;
  sys.spinor_dim = cl.dim;
  sys.grid_points = p.grid_points();
  sys.dim = int(sys.grid_points) * cl.dim;
  sys.omega = cl.omega;
  sys.projective_lift = s.projective;

  auto dirs = direction_orbit(p);
  RatMat big_m(n);
  for (const auto& v : dirs)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) big_m.at(i, j) += Rat(v[i] * v[j]);
  RatMat gm = so.gram * big_m;
  Rat c = gm.at(0, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!(gm.at(i, j) == (i == j ? c : Rat(0))))
        throw std::runtime_error(
            "direction orbit is not metric-isotropic; no exactly equivariant stencil");
  Rat alpha = Rat(1) / c;

  const Rat half_n(p.base.grid_n, 2);  // 1/(2h) = N/2
  for (const auto& v : dirs) {
    std::vector<ExactC> u(n);
    for (int i = 0; i < n; ++i) {
      Rat s_i(0);
      for (int j = 0; j < n; ++j) s_i += so.gram.at(i, j) * Rat(v[j]);
      u[i] = ExactC(alpha * s_i);
    }
    StencilTerm term;
    term.direction = v;
    term.coeff = ExactC(Rat(0), -half_n) * gamma_tilde(so, cl, u);
    sys.stencil.push_back(std::move(term));
  }

  // spin-structure twist -> per-axis boundary signs (unit groupoids only)
  bool has_twist = false;
  for (auto t : s.twist)
    if (t) has_twist = true;
  if (has_twist) {
    if (p.group.size() > 1)
      throw UnsupportedTwist("twisted structures are supported on unit groupoids");
    const int m = p.boxes_per_axis;
    for (int axis = 0; axis < n; ++axis) {
      int hol = 0;
      int stride = 1;
      for (int i = 0; i < axis; ++i) stride *= m;
      for (int k = 0; k < m; ++k) {
        int from = stride * k;
        int to = stride * ((k + 1) % m);
        auto it = p.unit_table.find((uint64_t(from) << 32) | uint32_t(to));
        if (it == p.unit_table.end())
          throw UnsupportedTwist("no unit chain along axis " + std::to_string(axis));
        hol ^= s.twist[it->second];
      }
      sys.boundary_sign[axis] = hol ? -1 : 1;
    }
  }

  // per-group-element spinor action (twist stripped; it lives in the signs)
  SpinStructure notwist = s;
  std::fill(notwist.twist.begin(), notwist.twist.end(), 0);
  auto rep = bundle::spin_action(p, notwist, cl);
  std::vector<std::optional<ExactMat>> rho_of_group(p.group.size());
  for (const auto& comp : p.components) {
    auto& slot = rho_of_group[comp.group_index];
    if (!slot) slot = rep[comp.id];
    else if (!(*slot == rep[comp.id]))
      throw NotSpin("spin action is not constant per group element");
  }
  for (size_t g = 0; g < p.group.size(); ++g) {
    GroupAction act;
    act.group_index = int(g);
    act.rho_inv = rho_of_group[g]->adjoint();
    act.perm.resize(sys.grid_points);
    for (size_t x = 0; x < sys.grid_points; ++x) act.perm[x] = int(p.act_grid(int(g), x));
    sys.actions.push_back(std::move(act));
  }

  sys.metadata = "n=" + std::to_string(n) + " N=" + std::to_string(p.base.grid_n) +
                 " |G|=" + std::to_string(p.group.size()) +
                 (s.projective ? " lift=projective" : " lift=spin");
  return sys;
}

CommuteReport commute_check(const GroupoidPresentation& p, const DiracSystem& sys,
                            const std::vector<ExactMat>& spin_rep) {
  CommuteReport rep;
  const int n = sys.n;
  // representation replay: U_tau U_sigma = U_{tau sigma}; a mis-specified sign
  // or phase on a single component is invisible to conjugation but breaks this
  for (const auto& [key, comp_id] : p.compose_table) {
    int first = int(key & 0xffffffffu);
    int second = int(key >> 32);
    if (!(spin_rep[second] * spin_rep[first] == spin_rep[comp_id])) {
      rep.exact_zero = false;
      rep.offending_components.push_back(comp_id);
    }
  }
  for (const auto& comp : p.components) {
    const IMat ainv = comp.germ.a.inverse();
    const ExactMat& rho = spin_rep[comp.id];
    ExactMat rho_inv = rho.adjoint();
    bool bad = false;
    for (const auto& term : sys.stencil) {
      IVec w = ainv * term.direction;
      const StencilTerm* match = nullptr;
      int sign = 1;
      for (const auto& t2 : sys.stencil) {
        if (t2.direction == w) { match = &t2; sign = 1; break; }
        IVec neg(n);
        for (int i = 0; i < n; ++i) neg[i] = -t2.direction[i];
        if (neg == w) { match = &t2; sign = -1; break; }
      }
      if (!match) { bad = true; break; }
      ExactMat conj = rho_inv * term.coeff * rho;
      ExactMat expect = sign > 0 ? match->coeff : -match->coeff;
      if (!(conj == expect)) { bad = true; break; }
    }
    if (bad) {
      rep.exact_zero = false;
      rep.offending_components.push_back(comp.id);
    }
  }

  // double-precision probe of [D, P] on a seeded vector
  std::mt19937_64 rng(0x5EED);
  std::uniform_real_distribution<double> d(-1, 1);
  std::vector<cplx> v(sys.dim), dp(sys.dim), pd(sys.dim), t(sys.dim);
  for (auto& z : v) z = cplx(d(rng), d(rng));
  sys.apply_projector(v, t);
  sys.apply(t, dp);
  sys.apply(v, t, kernels::Exec::Parallel);
  sys.apply_projector(t, pd);
  double num = 0, den = 0;
  for (int i = 0; i < sys.dim; ++i) {
    num += std::norm(dp[i] - pd[i]);
    den += std::norm(v[i]);
  }
  rep.matrix_probe_residual = std::sqrt(num / std::max(den, 1e-300));
  return rep;
}

bool brute_force_equivariance(const GroupoidPresentation& p, const DiracSystem& sys,
                              const std::vector<ExactMat>& spin_rep, int component) {
  const auto& comp = p.components[component];
  const int S = sys.spinor_dim;
  const size_t gp = sys.grid_points;
  const size_t dim = gp * S;
  if (dim > 4096) throw std::runtime_error("brute force reserved for small grids");

  std::vector<ExactC> d(dim * dim);
  for (size_t x = 0; x < gp; ++x)
    for (const auto& term : sys.stencil) {
      auto [yp, sp] = sys.step(x, term.direction, +1);
      auto [ym, sm] = sys.step(x, term.direction, -1);
      for (int r = 0; r < S; ++r)
        for (int c = 0; c < S; ++c) {
          ExactC v = term.coeff.at(r, c);
          if (v.is_zero()) continue;
          ExactC vp = sp > 0 ? v : -v;
          ExactC vm = sm > 0 ? v : -v;
          d[(x * S + r) * dim + yp * S + c] += vp;
          d[(x * S + r) * dim + ym * S + c] -= vm;
        }
    }

  std::vector<int> phi(gp);
  for (size_t x = 0; x < gp; ++x) phi[x] = int(p.act_grid(comp.group_index, x));
  ExactMat rho_inv = spin_rep[component].adjoint();
  ExactMat rho = spin_rep[component];

  for (size_t x = 0; x < gp; ++x)
    for (size_t y = 0; y < gp; ++y) {
      ExactMat block(S);
      for (int r = 0; r < S; ++r)
        for (int c = 0; c < S; ++c)
          block.at(r, c) = d[(size_t(phi[x]) * S + r) * dim + size_t(phi[y]) * S + c];
      ExactMat conj = rho_inv * block * rho;
      for (int r = 0; r < S; ++r)
        for (int c = 0; c < S; ++c)
          if (!(conj.at(r, c) == d[(x * S + r) * dim + y * S + c])) return false;
    }
  return true;
}

bool commutes_with_projector_exact(const DiracSystem& sys) {
  const int S = sys.spinor_dim;
  const size_t gp = sys.grid_points;
  const ExactC w(Rat(1, (long long)sys.actions.size()));

  auto d_row = [&](size_t x) {
    std::vector<std::pair<size_t, ExactMat>> row;
    for (const auto& term : sys.stencil) {
      auto [yp, sp] = sys.step(x, term.direction, +1);
      auto [ym, sm] = sys.step(x, term.direction, -1);
      ExactMat bp = sp > 0 ? term.coeff : -term.coeff;
      ExactMat bm = sm > 0 ? -term.coeff : term.coeff;
      row.push_back({yp, bp});
      row.push_back({ym, bm});
    }
    return row;
  };
  auto p_row = [&](size_t x) {
    std::vector<std::pair<size_t, ExactMat>> row;
    for (const auto& act : sys.actions)
      row.push_back({size_t(act.perm[x]), w * act.rho_inv});
    return row;
  };

  for (size_t x = 0; x < gp; ++x) {
    std::map<size_t, ExactMat> dp, pd;
    for (const auto& [y, db] : d_row(x))
      for (const auto& [z, pb] : p_row(y)) {
        auto it = dp.find(z);
        if (it == dp.end()) dp.emplace(z, db * pb);
        else it->second = it->second + db * pb;
      }
    for (const auto& [y, pb] : p_row(x))
      for (const auto& [z, db] : d_row(y)) {
        auto it = pd.find(z);
        if (it == pd.end()) pd.emplace(z, pb * db);
        else it->second = it->second + pb * db;
      }
    for (const auto& [z, m] : dp) {
      auto it = pd.find(z);
      ExactMat other = it == pd.end() ? ExactMat(S) : it->second;
      if (!((m - other).is_zero())) return false;
    }
    for (const auto& [z, m] : pd) {
      if (dp.count(z)) continue;
      if (!m.is_zero()) return false;
    }
  }
  return true;
}

}  // namespace etale::dirac
