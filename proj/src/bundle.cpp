#include "etale/bundle.hpp"

#include "etale/cohomology.hpp"

namespace etale::bundle {

using cohomology::Nerve;

ChartIndex ChartIndex::build(const GroupoidPresentation& p) {
  ChartIndex idx;
  idx.points.resize(p.charts.size());
  idx.local.resize(p.charts.size());
  for (int a = 0; a < int(p.charts.size()); ++a) {
    groupoid::chart_points_visit(p, a, [&](size_t g, const RatVec&) {
      idx.local[a][g] = int(idx.points[a].size());
      idx.points[a].push_back(g);
    });
  }
  return idx;
}

BundleData reconstruct_bundle(const GroupoidPresentation& p,
                              const std::vector<ExactMat>& cocycle, int rank,
                              BundleData::Kind kind) {
  if (cocycle.size() != p.components.size())
    throw NotACocycle("cocycle must assign a matrix to every component");
  for (const auto& m : cocycle)
    if (m.n != rank) throw NotACocycle("cocycle rank mismatch");
  Nerve nerve = Nerve::build(p);
  for (auto [second, first] : nerve.pairs) {
    int comp = p.compose(second, first);
    if (!(cocycle[second] * cocycle[first] == cocycle[comp]))
      throw NotACocycle("cocycle fails multiplicativity on pair (" +
                        std::to_string(second) + "," + std::to_string(first) + ")");
  }
  BundleData b;
  b.rank = rank;
  b.kind = kind;
  b.cocycle = cocycle;
  return b;
}

MetricField constant_metric(const GroupoidPresentation& p, const ChartIndex& idx,
                            const ExactMat& g) {
  MetricField m(p.charts.size());
  for (size_t a = 0; a < p.charts.size(); ++a) m[a].assign(idx.points[a].size(), g);
  return m;
}

namespace {

struct FibreSum {
  // weights of the arrows leaving (chart, point): component id + target local point
  std::vector<std::tuple<int, int, Rat>> arrows;  // (component, tgt local idx, weight)
};

// Precomputed fibre structure with cutoff weights for the averaging formulas.
std::vector<std::vector<FibreSum>> fibres(const GroupoidPresentation& p,
                                          const ChartIndex& idx) {
  auto cw = groupoid::cutoff_weights(p);
  std::vector<std::unordered_map<size_t, int>> cwlocal(p.charts.size());
  for (size_t a = 0; a < p.charts.size(); ++a)
    for (size_t k = 0; k < cw.points[a].size(); ++k) cwlocal[a][cw.points[a][k]] = int(k);

  std::vector<std::vector<FibreSum>> out(p.charts.size());
  for (int a = 0; a < int(p.charts.size()); ++a) {
    out[a].resize(idx.points[a].size());
    groupoid::chart_points_visit(p, a, [&](size_t xidx, const RatVec& lift) {
      FibreSum fs;
      for (const auto& comp : p.components) {
        if (comp.src != a || !p.support[comp.id].get(xidx)) continue;
        size_t yidx = p.torus_grid_index(comp.germ.apply(lift));
        int ylocal = idx.local[comp.tgt].at(yidx);
        Rat w = cw.values[comp.tgt][cwlocal[comp.tgt].at(yidx)];
        fs.arrows.emplace_back(comp.id, ylocal, w);
      }
      out[a][idx.local[a].at(xidx)] = std::move(fs);
    });
  }
  return out;
}

}  // namespace

MetricField average_inner_product(const GroupoidPresentation& p, const ChartIndex& idx,
                                  const BundleData& bundle, const MetricField& seed) {
  auto fib = fibres(p, idx);
  MetricField out(p.charts.size());
  for (size_t a = 0; a < p.charts.size(); ++a) {
    out[a].resize(idx.points[a].size());
    for (size_t k = 0; k < idx.points[a].size(); ++k) {
      ExactMat acc(bundle.rank);
      for (const auto& [comp, ylocal, w] : fib[a][k].arrows) {
        const ExactMat& rho = bundle.cocycle[comp];
        ExactMat term = rho.adjoint() * seed[p.components[comp].tgt][ylocal] * rho;
        acc = acc + ExactC(w) * term;
      }
      out[a][k] = std::move(acc);
    }
  }
  return out;
}

bool metric_is_invariant(const GroupoidPresentation& p, const ChartIndex& idx,
                         const BundleData& bundle, const MetricField& m) {
  bool ok = true;
  for (const auto& comp : p.components) {
    groupoid::chart_points_visit(p, comp.src, [&](size_t xidx, const RatVec& lift) {
      if (!ok || !p.support[comp.id].get(xidx)) return;
      size_t yidx = p.torus_grid_index(comp.germ.apply(lift));
      const ExactMat& rho = bundle.cocycle[comp.id];
      ExactMat lhs = rho.adjoint() * m[comp.tgt][idx.local[comp.tgt].at(yidx)] * rho;
      if (!(lhs == m[comp.src][idx.local[comp.src].at(xidx)])) ok = false;
    });
    if (!ok) break;
  }
  return ok;
}

ConnectionData zero_connection(const GroupoidPresentation& p, const ChartIndex& idx,
                               int rank) {
  ConnectionData c;
  c.coeff.resize(p.charts.size());
  c.hermitian_projection_distance_num = Rat(0);
  for (size_t a = 0; a < p.charts.size(); ++a) {
    c.coeff[a].resize(idx.points[a].size());
    for (auto& axes : c.coeff[a])
      for (int i = 0; i < p.base.dim; ++i) axes[i] = ExactMat(rank);
  }
  return c;
}

ConnectionData average_connection(const GroupoidPresentation& p, const ChartIndex& idx,
                                  const BundleData& bundle, const ConnectionData& seed) {
  auto fib = fibres(p, idx);
  const int n = p.base.dim;
  ConnectionData out = zero_connection(p, idx, bundle.rank);
  for (size_t a = 0; a < p.charts.size(); ++a) {
    for (size_t k = 0; k < idx.points[a].size(); ++k) {
      for (const auto& [comp, ylocal, w] : fib[a][k].arrows) {
        const auto& germ_a = p.components[comp].germ.a;
        const ExactMat& rho = bundle.cocycle[comp];
        ExactMat rho_inv = rho.adjoint();  // unitary cocycles
        for (int i = 0; i < n; ++i) {
          // (phi^* A)_i = sum_j (A_sigma)_{ji} Ad(rho)^{-1} A_j(phi x)
          ExactMat pull(bundle.rank);
          for (int j = 0; j < n; ++j) {
            long long aji = germ_a.at(j, i);
            if (aji == 0) continue;
            ExactMat term = rho_inv * seed.coeff[p.components[comp].tgt][ylocal][j] * rho;
            pull = pull + ExactC(Rat(aji)) * term;
          }
          out.coeff[a][k][i] = out.coeff[a][k][i] + ExactC(w) * pull;
        }
      }
    }
  }
  return out;
}

bool connection_is_invariant(const GroupoidPresentation& p, const ChartIndex& idx,
                             const BundleData& bundle, const ConnectionData& a) {
  bool ok = true;
  const int n = p.base.dim;
  for (const auto& comp : p.components) {
    groupoid::chart_points_visit(p, comp.src, [&](size_t xidx, const RatVec& lift) {
      if (!ok || !p.support[comp.id].get(xidx)) return;
      size_t yidx = p.torus_grid_index(comp.germ.apply(lift));
      int xl = idx.local[comp.src].at(xidx);
      int yl = idx.local[comp.tgt].at(yidx);
      const ExactMat& rho = bundle.cocycle[comp.id];
      ExactMat rho_inv = rho.adjoint();
      for (int i = 0; i < n && ok; ++i) {
        ExactMat pull(bundle.rank);
        for (int j = 0; j < n; ++j) {
          long long aji = comp.germ.a.at(j, i);
          if (aji == 0) continue;
          pull = pull + ExactC(Rat(aji)) * (rho_inv * a.coeff[comp.tgt][yl][j] * rho);
        }
        if (!(pull == a.coeff[comp.src][xl][i])) ok = false;
      }
    });
    if (!ok) break;
  }
  return ok;
}

ConnectionData hermitian_projection(const GroupoidPresentation& p, const ChartIndex& idx,
                                    const ConnectionData& a, const ExactMat& fibre_metric,
                                    bool& moved) {
  // anti-selfadjoint part w.r.t. G: A -> (A - G^{-1} A* G)/2
  (void)p;
  (void)idx;
  ConnectionData out = a;
  moved = false;
  // G is constant here; invert by adjugate using the exact field
  ExactMat g = fibre_metric;
  ExactMat ginv(g.n);
  if (g.n == 1) {
    ginv.at(0, 0) = g.at(0, 0).inverse();
  } else if (g.n == 2) {
    ExactC det = g.at(0, 0) * g.at(1, 1) - g.at(0, 1) * g.at(1, 0);
    ExactC dinv = det.inverse();
    ginv.at(0, 0) = g.at(1, 1) * dinv;
    ginv.at(1, 1) = g.at(0, 0) * dinv;
    ginv.at(0, 1) = -g.at(0, 1) * dinv;
    ginv.at(1, 0) = -g.at(1, 0) * dinv;
  } else {
    throw UnsupportedDim("hermitian projection implemented for rank <= 2");
  }
  const ExactC half(Rat(1, 2));
  for (auto& chart : out.coeff)
    for (auto& axes : chart)
      for (auto& m : axes) {
        if (m.n == 0) continue;
        ExactMat proj = half * (m - ginv * m.adjoint() * g);
        if (!(proj == m)) moved = true;
        m = proj;
      }
  return out;
}

}  // namespace etale::bundle
