#include "etale/verify.hpp"

#include <functional>
#include <random>

namespace etale::verify {

namespace {

constexpr double kTau = 6.283185307179586476925;

// multiplication operator as a vector transform
void mul_fn(const DiracSystem& sys, const std::vector<cplx>& f, const std::vector<cplx>& v,
            std::vector<cplx>& out) {
  const int S = sys.spinor_dim;
  out.resize(sys.dim);
  for (size_t x = 0; x < sys.grid_points; ++x)
    for (int s = 0; s < S; ++s) out[x * S + s] = f[x] * v[x * S + s];
}

void commutator_apply(const DiracSystem& sys, const std::vector<cplx>& f,
                      const std::vector<cplx>& v, std::vector<cplx>& out) {
  std::vector<cplx> fv, dfv, dv, fdv;
  mul_fn(sys, f, v, fv);
  sys.apply(fv, dfv);
  sys.apply(v, dv);
  mul_fn(sys, f, dv, fdv);
  out.resize(sys.dim);
  for (int i = 0; i < sys.dim; ++i) out[i] = dfv[i] - fdv[i];
}

std::vector<cplx> coordinate_exponential(const GroupoidPresentation& p, int axis,
                                         int conj) {
  std::vector<cplx> f(p.grid_points());
  for (size_t x = 0; x < p.grid_points(); ++x) {
    IVec j = p.unflat(x);
    double t = kTau * double(j[axis]) / p.base.grid_n;
    f[x] = conj ? cplx(std::cos(t), -std::sin(t)) : cplx(std::cos(t), std::sin(t));
  }
  return f;
}

double probe_residual(const DiracSystem& sys,
                      const std::function<void(const std::vector<cplx>&,
                                               std::vector<cplx>&)>& cycle_op) {
  // constant spinor probes; the discrete cycle identity is exact on them
  double worst = 0;
  for (int s = 0; s < sys.spinor_dim; ++s) {
    std::vector<cplx> v(sys.dim, cplx(0, 0));
    for (size_t x = 0; x < sys.grid_points; ++x) v[x * sys.spinor_dim + s] = 1.0;
    double nv = kernels::nrm2(v, kernels::Exec::Serial);
    std::vector<cplx> cv, wv;
    cycle_op(v, cv);
    sys.apply_omega(v, wv);
    double num = 0;
    for (int i = 0; i < sys.dim; ++i) num += std::norm(cv[i] - wv[i]);
    worst = std::max(worst, std::sqrt(num) / nv);
  }
  return worst;
}

}  // namespace

OrientationResult orientation_cycle(const GroupoidPresentation& p,
                                    const DiracSystem& sys) {
  OrientationResult res;
  const int n = p.base.dim;
  const int N = p.base.grid_n;
  const double two_pi_n = double(N) * std::sin(kTau / N);  // frozen discrete 2pi

  if (n == 1) {
    auto u = coordinate_exponential(p, 0, 0);
    auto us = coordinate_exponential(p, 0, 1);
    res.description = "(2 pi_N)^{-1} u* [D, u]";
    auto op = [&](const std::vector<cplx>& v, std::vector<cplx>& out) {
      std::vector<cplx> t1;
      commutator_apply(sys, u, v, t1);
      mul_fn(sys, us, t1, out);
      for (auto& z : out) z /= two_pi_n;
    };
    res.residual = probe_residual(sys, op);
    // b(a0 (x) a1) = a0 a1 - a1 a0 = 0 in the function algebra
    // commutative algebra: b(a0 (x) a1) = a0 a1 - a1 a0 = 0 pointwise
    double worst = 0;
    for (size_t x = 0; x < p.grid_points(); ++x)
      worst = std::max(worst, std::abs(us[x] * u[x] - u[x] * us[x]));
    res.boundary_residual = worst;
    return res;
  }
  if (n == 2) {
    auto u = coordinate_exponential(p, 0, 0);
    auto us = coordinate_exponential(p, 0, 1);
    auto v = coordinate_exponential(p, 1, 0);
    auto vs = coordinate_exponential(p, 1, 1);
    std::vector<cplx> uvs(p.grid_points());
    for (size_t x = 0; x < p.grid_points(); ++x) uvs[x] = us[x] * vs[x];
    // K [ (uv)* [D,u][D,v] - (uv)* [D,v][D,u] ] with K = i / (2 (2pi_N)^2)
    const cplx K = cplx(0, 1) / (2.0 * two_pi_n * two_pi_n);
    res.description = "i/(2 (2 pi_N)^2) (uv)* ([D,u][D,v] - [D,v][D,u])";
    auto op = [&](const std::vector<cplx>& w, std::vector<cplx>& out) {
      std::vector<cplx> t1, t2, t3, t4;
      commutator_apply(sys, v, w, t1);
      commutator_apply(sys, u, t1, t2);
      commutator_apply(sys, u, w, t3);
      commutator_apply(sys, v, t3, t4);
      out.resize(sys.dim);
      std::vector<cplx> diff(sys.dim);
      for (int i = 0; i < sys.dim; ++i) diff[i] = t2[i] - t4[i];
      mul_fn(sys, uvs, diff, out);
      for (auto& z : out) z *= K;
    };
    res.residual = probe_residual(sys, op);
    // b(c): chain (uv)* (x) u (x) v - (uv)* (x) v (x) u; its Hochschild
    // boundary collapses pointwise in the commutative algebra
    double worst = 0;
    std::mt19937_64 rng(0x5EED);
    for (int t = 0; t < 24; ++t) {
      size_t x = rng() % p.grid_points();
      size_t y = rng() % p.grid_points();
      // direct evaluation of the Hochschild boundary pairing d(c)(x,y) =
      //   (uv)*u (x) v - (uv)* (x) uv + v(uv)* (x) u  [first summand]
      // - (uv)*v (x) u + (uv)* (x) vu - u(uv)* (x) v  [second summand]
      cplx acc = (uvs[x] * u[x]) * v[y] - uvs[x] * (u[y] * v[y]) +
                 (v[x] * uvs[x]) * u[y] - (uvs[x] * v[x]) * u[y] +
                 uvs[x] * (v[y] * u[y]) - (u[x] * uvs[x]) * v[y];
      worst = std::max(worst, std::abs(acc));
    }
    res.boundary_residual = worst;
    return res;
  }
  throw cohomology::UnsupportedDim("orientation cycle supports n in {1,2}");
}

OrientationResult invariant_cycle_search(const GroupoidPresentation& p,
                                         const DiracSystem& sys, int samples) {
  if (p.base.dim != 2)
    throw cohomology::UnsupportedDim("invariant cycle search is the n = 2 case");
  auto fns = sample_invariant_functions(p, samples);
  OrientationResult best;
  best.residual = 1e300;
  best.description = "best invariant-algebra 2-cycle";
  // probe vector: constant spinor
  for (size_t i = 0; i < fns.size(); ++i)
    for (size_t j = 0; j < fns.size(); ++j) {
      if (i == j) continue;
      for (int s = 0; s < sys.spinor_dim; ++s) {
        std::vector<cplx> w(sys.dim, cplx(0, 0));
        for (size_t x = 0; x < sys.grid_points; ++x) w[x * sys.spinor_dim + s] = 1.0;
        std::vector<cplx> t1, t2, t3, t4, cv(sys.dim), wv;
        commutator_apply(sys, fns[j], w, t1);
        commutator_apply(sys, fns[i], t1, t2);
        commutator_apply(sys, fns[i], w, t3);
        commutator_apply(sys, fns[j], t3, t4);
        for (int q = 0; q < sys.dim; ++q) cv[q] = t2[q] - t4[q];
        sys.apply_omega(w, wv);
        // least-squares optimal complex scale: residual = sin of the angle
        cplx num(0, 0);
        double den = 0, nw = 0;
        for (int q = 0; q < sys.dim; ++q) {
          num += std::conj(cv[q]) * wv[q];
          den += std::norm(cv[q]);
          nw += std::norm(wv[q]);
        }
        double resid;
        if (den < 1e-300) {
          resid = 1.0;  // cycle image vanishes entirely
        } else {
          double cos2 = std::norm(num) / (den * nw);
          resid = std::sqrt(std::max(0.0, 1.0 - cos2));
        }
        best.residual = std::min(best.residual, resid);
      }
    }
  return best;
}

CommutatorNorm commutator_norm(const GroupoidPresentation& p, const DiracSystem& sys,
                               const std::vector<cplx>& f, uint64_t seed, int max_iter) {
  CommutatorNorm out;
  std::vector<cplx> fs(f.size());
  for (size_t i = 0; i < f.size(); ++i) fs[i] = std::conj(f[i]);
  auto apply = [&](const std::vector<cplx>& v, std::vector<cplx>& o) {
    commutator_apply(sys, f, v, o);
  };
  auto apply_adj = [&](const std::vector<cplx>& v, std::vector<cplx>& o) {
    // [D, f]^* = [f*, D] = -[D, f*]
    commutator_apply(sys, fs, v, o);
    for (auto& z : o) z = -z;
  };
  auto res = kernels::power_norm(sys.dim, apply, apply_adj, seed, max_iter, 1e-6);
  out.norm = res.norm;
  out.iterations = res.iterations;

  // Lipschitz bound sup |grad f| in the averaged metric, via central differences
  RatMat gram = p.base.gram;
  RatMat ginv = gram.inverse();
  const int n = p.base.dim;
  const int N = p.base.grid_n;
  double worst = 0;
  for (size_t x = 0; x < p.grid_points(); ++x) {
    IVec j = p.unflat(x);
    std::array<cplx, kMaxDim> grad{};
    for (int i = 0; i < n; ++i) {
      IVec jp = j, jm = j;
      jp[i] = (j[i] + 1) % N;
      jm[i] = (j[i] - 1 + N) % N;
      grad[i] = 0.5 * double(N) * (f[p.flat(jp)] - f[p.flat(jm)]);
    }
    double q = 0;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        q += std::real(std::conj(grad[i]) * grad[k]) * ginv.at(i, k).to_double();
    worst = std::max(worst, q);
  }
  out.lipschitz_bound = std::sqrt(worst);
  return out;
}

std::vector<std::vector<cplx>> sample_invariant_functions(
    const GroupoidPresentation& p, int count, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<cplx>> out;
  const int N = p.base.grid_n;
  const int n = p.base.dim;
  int guard = 0;
  while (int(out.size()) < count && guard++ < 200) {
    // orbit-sum of a random low Fourier mode: automatically invariant
    IVec k(n);
    bool zero = true;
    for (int i = 0; i < n; ++i) {
      k[i] = (long long)(rng() % 7) - 3;
      if (k[i]) zero = false;
    }
    if (zero) continue;
    std::vector<cplx> f(p.grid_points(), cplx(0, 0));
    for (const auto& g : p.group) {
      // mode transported by the dual action: exp(tau i <k, g x>)
      for (size_t x = 0; x < p.grid_points(); ++x) {
        RatVec gx = g.a * p.grid_coord(x);
        for (int i = 0; i < n; ++i) gx[i] += g.b[i];
        double phase = 0;
        for (int i = 0; i < n; ++i) phase += double(k[i]) * gx[i].to_double();
        phase *= 6.283185307179586476925;
        f[x] += cplx(std::cos(phase), std::sin(phase));
      }
    }
    // normalize amplitude
    double mx = 0;
    for (auto& z : f) mx = std::max(mx, std::abs(z));
    if (mx < 1e-9) continue;
    for (auto& z : f) z /= mx;
    if (!is_invariant_function(p, f, 1e-10)) continue;
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace etale::verify
