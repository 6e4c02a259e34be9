#include "etale/verify.hpp"

#include <climits>
#include <map>

namespace etale::verify {

using groupoid::BumpKind;

OrbitMeasure orbit_measure(const GroupoidPresentation& p, BumpKind kind) {
  OrbitMeasure m;
  m.idx = bundle::ChartIndex::build(p);
  const int nch = int(p.charts.size());
  const size_t gp = p.grid_points();

  // local group of a chart: elements whose translate meets the chart box
  std::vector<std::vector<int>> local_group(nch);
  for (int a = 0; a < nch; ++a) {
    std::vector<uint8_t> meets(p.group.size(), 0);
    groupoid::chart_points_visit(p, a, [&](size_t, const RatVec& lift) {
      for (size_t g = 0; g < p.group.size(); ++g) {
        if (meets[g]) continue;
        RatVec y = p.group[g].a * lift;
        for (int i = 0; i < p.base.dim; ++i) y[i] += p.group[g].b[i];
        if (p.lift_into(RatVec(y), p.charts[a].box)) {
          // mod 1 lift handled inside lift_into via mod arithmetic
        }
        RatVec ym(p.base.dim);
        for (int i = 0; i < p.base.dim; ++i) ym[i] = y[i].mod1();
        if (p.lift_into(ym, p.charts[a].box)) meets[g] = 1;
      }
    });
    for (size_t g = 0; g < p.group.size(); ++g)
      if (meets[g]) local_group[a].push_back(int(g));
  }

  // k_a: minimum isotropy order over the chart's grid points
  std::vector<long long> k_min(nch, 1);
  {
    std::vector<int> iso_order(gp, 0);
    for (size_t x = 0; x < gp; ++x) {
      int cnt = 0;
      for (size_t g = 0; g < p.group.size(); ++g)
        if (p.act_grid(int(g), x) == x) ++cnt;
      iso_order[x] = cnt;
    }
    for (int a = 0; a < nch; ++a) {
      long long mn = LLONG_MAX;
      for (size_t xg : m.idx.points[a]) mn = std::min(mn, (long long)iso_order[xg]);
      k_min[a] = mn == LLONG_MAX ? 1 : mn;
    }
  }
  m.weight.resize(nch);
  for (int a = 0; a < nch; ++a)
    m.weight[a] = Rat(k_min[a], (long long)local_group[a].size());

  // orbit-averaged bump densities rho-hat, then the orbit normalizer S-hat
  // rho_hat_a(x) = mean of bump_a over orbit(x) meet Box_a
  std::vector<std::vector<Rat>> rho_hat(nch);
  for (int a = 0; a < nch; ++a) rho_hat[a].resize(m.idx.points[a].size());
  for (int a = 0; a < nch; ++a) {
    groupoid::chart_points_visit(p, a, [&](size_t xg, const RatVec&) {
      // orbit of the torus point
      Rat sum(0);
      long long count = 0;
      std::vector<size_t> orbit;
      for (size_t g = 0; g < p.group.size(); ++g) {
        size_t y = p.act_grid(int(g), xg);
        if (std::find(orbit.begin(), orbit.end(), y) == orbit.end()) orbit.push_back(y);
      }
      for (size_t y : orbit) {
        auto lift = p.lift_into(p.grid_coord(y), p.charts[a].box);
        if (!lift) continue;
        sum += groupoid::bump_value(p, a, *lift, kind);
        ++count;
      }
      rho_hat[a][m.idx.local[a].at(xg)] = count ? sum / Rat(count) : Rat(0);
    });
  }
  // S-hat(orbit) = sum over charts meeting the orbit of the shared value
  m.partition.resize(nch);
  for (int a = 0; a < nch; ++a) m.partition[a].resize(m.idx.points[a].size());
  std::vector<uint8_t> done(gp, 0);
  for (size_t x = 0; x < gp; ++x) {
    if (done[x]) continue;
    std::vector<size_t> orbit;
    for (size_t g = 0; g < p.group.size(); ++g) {
      size_t y = p.act_grid(int(g), x);
      if (std::find(orbit.begin(), orbit.end(), y) == orbit.end()) orbit.push_back(y);
    }
    for (size_t y : orbit) done[y] = 1;
    Rat shat(0);
    for (int b = 0; b < nch; ++b) {
      // value of rho_hat_b at any orbit point inside box b (constant there)
      for (size_t y : orbit) {
        auto it = m.idx.local[b].find(y);
        if (it != m.idx.local[b].end()) {
          shat += rho_hat[b][it->second];
          break;
        }
      }
    }
    if (shat.is_zero()) throw groupoid::DegenerateBump("orbit bump sum vanishes");
    for (size_t y : orbit)
      for (int b = 0; b < nch; ++b) {
        auto it = m.idx.local[b].find(y);
        if (it != m.idx.local[b].end())
          m.partition[b][it->second] = rho_hat[b][it->second] / shat;
      }
  }

  m.volume_density = std::sqrt(std::abs(p.base.gram.det().to_double()));
  return m;
}

bool is_invariant_function(const GroupoidPresentation& p, const std::vector<cplx>& f,
                           double tol) {
  double scale = 0;
  for (const auto& z : f) scale = std::max(scale, std::abs(z));
  for (size_t g = 1; g < p.group.size(); ++g)
    for (size_t x = 0; x < p.grid_points(); ++x)
      if (std::abs(f[p.act_grid(int(g), x)] - f[x]) > tol * std::max(1.0, scale))
        return false;
  return true;
}

cplx orbit_integral_c(const GroupoidPresentation& p, const OrbitMeasure& m,
                      const std::vector<cplx>& f) {
  if (!is_invariant_function(p, f)) throw NotInvariant("integrand is not invariant");
  const double cell = std::pow(1.0 / p.base.grid_n, p.base.dim);
  cplx total(0, 0);
  for (size_t a = 0; a < p.charts.size(); ++a) {
    cplx chart_sum(0, 0);
    for (size_t k = 0; k < m.idx.points[a].size(); ++k)
      chart_sum += m.partition[a][k].to_double() * f[m.idx.points[a][k]];
    total += m.weight[a].to_double() * chart_sum;
  }
  return total * cell * m.volume_density;
}

double orbit_integral(const GroupoidPresentation& p, const OrbitMeasure& m,
                      const std::vector<double>& f) {
  std::vector<cplx> fc(f.begin(), f.end());
  return orbit_integral_c(p, m, fc).real();
}

cplx l2_inner_product(const GroupoidPresentation& p, const OrbitMeasure& m,
                      const DiracSystem& sys, const std::vector<cplx>& psi1,
                      const std::vector<cplx>& psi2) {
  // invariance of the sections under the spinor-level action
  std::vector<cplx> u1, u2;
  sys.apply_projector(psi1, u1);
  sys.apply_projector(psi2, u2);
  double n1 = 0, n2 = 0, d1 = 0, d2 = 0;
  for (int i = 0; i < sys.dim; ++i) {
    n1 += std::norm(u1[i] - psi1[i]);
    n2 += std::norm(u2[i] - psi2[i]);
    d1 += std::norm(psi1[i]);
    d2 += std::norm(psi2[i]);
  }
  if (n1 > 1e-20 * std::max(1.0, d1) || n2 > 1e-20 * std::max(1.0, d2))
    throw NotInvariant("sections are not Theta-invariant");
  const int S = sys.spinor_dim;
  std::vector<cplx> pairing(p.grid_points(), cplx(0, 0));
  for (size_t x = 0; x < p.grid_points(); ++x)
    for (int s = 0; s < S; ++s)
      pairing[x] += std::conj(psi1[x * S + s]) * psi2[x * S + s];
  return orbit_integral_c(p, m, pairing);
}

}  // namespace etale::verify
