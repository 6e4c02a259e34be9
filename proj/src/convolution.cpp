#include "etale/verify.hpp"

namespace etale::verify {

bool is_effective(const GroupoidPresentation& p) {
  // distinct group elements must define distinct affine germs mod 1
  for (size_t g = 0; g < p.group.size(); ++g)
    for (size_t h = g + 1; h < p.group.size(); ++h)
      if (p.group[g].a == p.group[h].a && p.group[g].b == p.group[h].b) return false;
  return true;
}

ConvolutionElement element_from_group_functions(
    const GroupoidPresentation& p, const bundle::ChartIndex& idx,
    const std::vector<std::vector<cplx>>& f_of_group) {
  ConvolutionElement f;
  f.values.resize(p.components.size());
  for (const auto& comp : p.components) {
    const auto& pts = idx.points[comp.src];
    f.values[comp.id].assign(pts.size(), cplx(0, 0));
    for (size_t k = 0; k < pts.size(); ++k) {
      if (!p.support[comp.id].get(pts[k])) continue;  // compact support in the component
      f.values[comp.id][k] = f_of_group[comp.group_index][pts[k]];
    }
  }
  return f;
}

ConvolutionElement convolution_unit(const GroupoidPresentation& p,
                                    const bundle::ChartIndex& idx) {
  std::vector<std::vector<cplx>> fg(p.group.size(),
                                    std::vector<cplx>(p.grid_points(), cplx(0, 0)));
  std::fill(fg[0].begin(), fg[0].end(), cplx(1, 0));
  return element_from_group_functions(p, idx, fg);
}

std::vector<std::vector<cplx>> descend_to_group(const GroupoidPresentation& p,
                                                const bundle::ChartIndex& idx,
                                                const ConvolutionElement& f) {
  std::vector<std::vector<cplx>> fg(p.group.size(),
                                    std::vector<cplx>(p.grid_points(), cplx(0, 0)));
  std::vector<std::vector<uint8_t>> set(p.group.size(),
                                        std::vector<uint8_t>(p.grid_points(), 0));
  for (const auto& comp : p.components) {
    const auto& pts = idx.points[comp.src];
    for (size_t k = 0; k < pts.size(); ++k) {
      if (!p.support[comp.id].get(pts[k])) continue;
      cplx v = f.values[comp.id][k];
      auto& slot = fg[comp.group_index][pts[k]];
      auto& flag = set[comp.group_index][pts[k]];
      if (flag) {
        if (std::abs(slot - v) > 1e-12 * (1.0 + std::abs(slot)))
          throw NotEffective(
              "component values do not descend to a function on the groupoid");
      } else {
        slot = v;
        flag = 1;
      }
    }
  }
  return fg;
}

ConvolutionElement convolution_star(const GroupoidPresentation& p,
                                    const bundle::ChartIndex& idx,
                                    const ConvolutionElement& f,
                                    const ConvolutionElement& g) {
  auto fg = descend_to_group(p, idx, f);
  auto gg = descend_to_group(p, idx, g);
  auto mul = [&](int a, int b) {
    IMat m = p.group[a].a * p.group[b].a;
    RatVec t = p.group[a].a * p.group[b].b;
    for (int i = 0; i < p.base.dim; ++i) t[i] = (t[i] + p.group[a].b[i]).mod1();
    for (size_t k2 = 0; k2 < p.group.size(); ++k2)
      if (p.group[k2].a == m && p.group[k2].b == t) return int(k2);
    throw std::logic_error("group not closed");
  };
  auto inv = [&](int a) {
    for (size_t k2 = 0; k2 < p.group.size(); ++k2)
      if (mul(a, int(k2)) == 0) return int(k2);
    throw std::logic_error("group inverse missing");
  };
  const size_t gp = p.grid_points();
  std::vector<std::vector<cplx>> out(p.group.size(), std::vector<cplx>(gp, cplx(0, 0)));
  // (f * g)_k(y) = sum_u f_{k u^{-1}}(u y) g_u(y)
  for (size_t k = 0; k < p.group.size(); ++k)
    for (size_t u = 0; u < p.group.size(); ++u) {
      int fk = mul(int(k), inv(int(u)));
      for (size_t y = 0; y < gp; ++y) {
        cplx gv = gg[u][y];
        if (gv == cplx(0, 0)) continue;
        out[k][y] += fg[fk][p.act_grid(int(u), y)] * gv;
      }
    }
  return element_from_group_functions(p, idx, out);
}

void convolution_action(const GroupoidPresentation& p, const bundle::ChartIndex& idx,
                        const DiracSystem& sys, const ConvolutionElement& f,
                        const std::vector<cplx>& psi, std::vector<cplx>& out) {
  if (!is_effective(p)) throw NotEffective("presentation is not effective");
  auto fg = descend_to_group(p, idx, f);
  const int S = sys.spinor_dim;
  out.assign(sys.dim, cplx(0, 0));
  // (f psi)(x) = sum_g f_g(g^{-1} x) rho_s(g) psi(g^{-1} x); the stored action
  // holds rho^{-1} and the permutation x -> g x, so U_g^dagger gives rho_s(g).
  std::vector<std::vector<int>> inv_perm(p.group.size(), std::vector<int>(p.grid_points()));
  for (size_t g = 0; g < p.group.size(); ++g)
    for (size_t y = 0; y < p.grid_points(); ++y)
      inv_perm[g][sys.actions[g].perm[y]] = int(y);
  for (size_t g = 0; g < p.group.size(); ++g) {
    ExactMat rho = sys.actions[g].rho_inv.adjoint();  // rho_s(g)
    cplx r[2][2];
    for (int a = 0; a < S; ++a)
      for (int b = 0; b < S; ++b) r[a][b] = rho.at(a, b).to_complex();
    for (size_t x = 0; x < p.grid_points(); ++x) {
      size_t y = inv_perm[g][x];  // y = g^{-1} x
      cplx w = fg[g][y];
      if (w == cplx(0, 0)) continue;
      for (int a = 0; a < S; ++a) {
        cplx acc(0, 0);
        for (int b = 0; b < S; ++b) acc += r[a][b] * psi[y * S + b];
        out[x * S + a] += w * acc;
      }
    }
  }
}

}  // namespace etale::verify
