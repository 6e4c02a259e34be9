#include "etale/dirac.hpp"

#include <algorithm>
#include <numeric>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#ifdef ETALE_HAVE_LAPACKE
#define LAPACK_COMPLEX_CPP
#include <lapacke.h>
#endif

namespace etale::dirac {

void dense_hermitian_eig(int n, std::vector<cplx>& a, std::vector<double>& w) {
  w.assign(n, 0.0);
#ifdef ETALE_HAVE_LAPACKE
  int info = LAPACKE_zheevd(LAPACK_ROW_MAJOR, 'V', 'U', n,
                            reinterpret_cast<lapack_complex_double*>(a.data()), n,
                            w.data());
  if (info != 0) throw std::runtime_error("zheevd failed: info=" + std::to_string(info));
#else
  Eigen::MatrixXcd m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = a[size_t(r) * n + c];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  for (int i = 0; i < n; ++i) w[i] = es.eigenvalues()(i);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a[size_t(r) * n + c] = es.eigenvectors()(r, c);
#endif
}

namespace {

struct SparseVec {
  std::vector<std::pair<int, cplx>> e;  // sorted by index
};

double spar_norm(const SparseVec& v) {
  double s = 0;
  for (auto& [i, z] : v.e) s += std::norm(z);
  return std::sqrt(s);
}

cplx spar_dot(const SparseVec& a, const SparseVec& b) {
  cplx s(0, 0);
  size_t i = 0, j = 0;
  while (i < a.e.size() && j < b.e.size()) {
    if (a.e[i].first < b.e[j].first) ++i;
    else if (a.e[i].first > b.e[j].first) ++j;
    else {
      s += std::conj(a.e[i].second) * b.e[j].second;
      ++i;
      ++j;
    }
  }
  return s;
}

void spar_axpy(cplx alpha, const SparseVec& x, SparseVec& y) {
  SparseVec out;
  size_t i = 0, j = 0;
  while (i < x.e.size() || j < y.e.size()) {
    if (j >= y.e.size() || (i < x.e.size() && x.e[i].first < y.e[j].first)) {
      out.e.push_back({x.e[i].first, alpha * x.e[i].second});
      ++i;
    } else if (i >= x.e.size() || y.e[j].first < x.e[i].first) {
      out.e.push_back(y.e[j]);
      ++j;
    } else {
      out.e.push_back({y.e[j].first, y.e[j].second + alpha * x.e[i].second});
      ++i;
      ++j;
    }
  }
  y = std::move(out);
}

}  // namespace

std::vector<std::vector<cplx>> invariant_basis(const DiracSystem& sys) {
  const size_t gp = sys.grid_points;
  const int S = sys.spinor_dim;
  const size_t ng = sys.actions.size();

  std::vector<std::vector<int>> inv_perm(ng, std::vector<int>(gp));
  for (size_t g = 0; g < ng; ++g)
    for (size_t y = 0; y < gp; ++y) inv_perm[g][sys.actions[g].perm[y]] = int(y);

  const double w = 1.0 / double(ng);
  std::vector<uint8_t> seen(gp, 0);
  std::vector<SparseVec> sparse_basis;

  for (size_t x = 0; x < gp; ++x) {
    if (seen[x]) continue;
    for (size_t g = 0; g < ng; ++g) seen[inv_perm[g][x]] = 1;
    for (int s = 0; s < S; ++s) {
      // column x*S+s of P: nonzero at y = g^{-1} x with block w * rho_inv_g
      std::map<int, std::array<cplx, 2>> entries;
      for (size_t g = 0; g < ng; ++g) {
        int y = inv_perm[g][x];
        for (int r = 0; r < S; ++r) {
          cplx v = w * sys.actions[g].rho_inv.at(r, s).to_complex();
          if (v != cplx(0, 0)) entries[y][r] += v;
        }
      }
      SparseVec sv;
      for (auto& [y, vals] : entries)
        for (int r = 0; r < S; ++r)
          if (vals[r] != cplx(0, 0)) sv.e.push_back({y * S + r, vals[r]});
      std::sort(sv.e.begin(), sv.e.end(), [](auto& a, auto& b) { return a.first < b.first; });
      // Gram-Schmidt against earlier vectors (overlap only within this orbit)
      for (const auto& b : sparse_basis) {
        cplx proj = spar_dot(b, sv);
        if (proj != cplx(0, 0)) spar_axpy(-proj, b, sv);
      }
      double nv = spar_norm(sv);
      if (nv > 1e-10) {
        for (auto& [i2, z] : sv.e) z /= nv;
        sparse_basis.push_back(std::move(sv));
      }
    }
  }

  std::vector<std::vector<cplx>> out;
  out.reserve(sparse_basis.size());
  for (const auto& sv : sparse_basis) {
    std::vector<cplx> dense(sys.dim, cplx(0, 0));
    for (auto& [i, z] : sv.e) dense[i] = z;
    out.push_back(std::move(dense));
  }
  return out;
}

SpectrumResult full_spectrum_dense(const DiracSystem& sys) {
  auto csr = sys.to_csr();
  std::vector<cplx> a(size_t(sys.dim) * sys.dim, cplx(0, 0));
  for (int r = 0; r < sys.dim; ++r)
    for (int k = csr.row_ptr[r]; k < csr.row_ptr[r + 1]; ++k)
      a[size_t(r) * sys.dim + csr.col[k]] = csr.val[k];
  std::vector<double> w;
  dense_hermitian_eig(sys.dim, a, w);

  SpectrumResult res;
  res.subspace = "full";
  res.eigenvalues = w;
  res.residuals.resize(sys.dim);
  std::vector<cplx> v(sys.dim), dv(sys.dim);
  for (int k = 0; k < sys.dim; ++k) {
    for (int i = 0; i < sys.dim; ++i) v[i] = a[size_t(i) * sys.dim + k];
    sys.apply(v, dv);
    double num = 0;
    for (int i = 0; i < sys.dim; ++i) num += std::norm(dv[i] - w[k] * v[i]);
    res.residuals[k] = std::sqrt(num);
  }
  return res;
}

SpectrumResult smallest_spectrum(const DiracSystem& sys, int k, bool invariant,
                                 int dense_limit) {
  std::vector<std::vector<cplx>> basis;
  int opdim = sys.dim;
  if (invariant) {
    if (!commutes_with_projector_exact(sys))
      throw ProjectorNotCommuting("[D, P] is not exactly zero");
    basis = invariant_basis(sys);
    opdim = int(basis.size());
  }

  SpectrumResult res;
  res.subspace = invariant ? "invariant" : "full";

  if (opdim <= dense_limit) {
    std::vector<cplx> a;
    std::vector<double> w;
    if (invariant) {
      a.assign(size_t(opdim) * opdim, cplx(0, 0));
      std::vector<cplx> db(sys.dim);
      for (int j = 0; j < opdim; ++j) {
        sys.apply(basis[j], db);
        for (int i = 0; i < opdim; ++i) {
          cplx s(0, 0);
          for (int t = 0; t < sys.dim; ++t) s += std::conj(basis[i][t]) * db[t];
          a[size_t(i) * opdim + j] = s;
        }
      }
    } else {
      auto csr = sys.to_csr();
      a.assign(size_t(opdim) * opdim, cplx(0, 0));
      for (int r = 0; r < opdim; ++r)
        for (int t = csr.row_ptr[r]; t < csr.row_ptr[r + 1]; ++t)
          a[size_t(r) * opdim + csr.col[t]] = csr.val[t];
    }
    dense_hermitian_eig(opdim, a, w);
    std::vector<int> idx(opdim);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int i, int j) { return std::abs(w[i]) < std::abs(w[j]); });
    int keep = std::min(k, opdim);
    std::vector<std::pair<double, std::vector<cplx>>> pairs;
    for (int t = 0; t < keep; ++t) {
      std::vector<cplx> v(sys.dim, cplx(0, 0));
      if (invariant) {
        for (int i = 0; i < opdim; ++i) {
          cplx coef = a[size_t(i) * opdim + idx[t]];
          if (coef != cplx(0, 0))
            for (int q = 0; q < sys.dim; ++q) v[q] += coef * basis[i][q];
        }
      } else {
        for (int i = 0; i < opdim; ++i) v[i] = a[size_t(i) * opdim + idx[t]];
      }
      pairs.push_back({w[idx[t]], std::move(v)});
    }
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](auto& x, auto& y) { return x.first < y.first; });
    std::vector<cplx> dv(sys.dim);
    for (auto& [lam, v] : pairs) {
      sys.apply(v, dv);
      double num = 0, den = 0;
      for (int i = 0; i < sys.dim; ++i) {
        num += std::norm(dv[i] - lam * v[i]);
        den += std::norm(v[i]);
      }
      res.eigenvalues.push_back(lam);
      res.residuals.push_back(std::sqrt(num / std::max(den, 1e-300)));
    }
    return res;
  }

  // Block inverse subspace iteration on (D^2 + I)^{-1} with Rayleigh-Ritz
  // against D itself; robust to the high multiplicities of the doubled
  // discrete spectra. Deterministic seeded start block.
  auto csr = sys.to_csr();
  Eigen::SparseMatrix<cplx> D(sys.dim, sys.dim);
  {
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(csr.val.size());
    for (int r = 0; r < sys.dim; ++r)
      for (int t = csr.row_ptr[r]; t < csr.row_ptr[r + 1]; ++t)
        trip.emplace_back(r, csr.col[t], csr.val[t]);
    D.setFromTriplets(trip.begin(), trip.end());
  }
  Eigen::SparseMatrix<cplx> M = (D * D).pruned();
  for (int i = 0; i < sys.dim; ++i) M.coeffRef(i, i) += cplx(1.0, 0.0);
  M.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
  lu.compute(M);
  if (lu.info() != Eigen::Success) throw std::runtime_error("sparse LU failed");

  const int block = std::min(sys.dim, k + 24);
  Eigen::MatrixXcd X(sys.dim, block);
  {
    uint64_t state = 0x5EED;
    auto next = [&state]() {
      state ^= state << 13;
      state ^= state >> 7;
      state ^= state << 17;
      return double(state % 1000003) / 1000003.0 - 0.5;
    };
    for (int j = 0; j < block; ++j)
      for (int i = 0; i < sys.dim; ++i) X(i, j) = cplx(next(), next());
  }
  std::vector<cplx> tmp_in(sys.dim), tmp_out(sys.dim);
  auto project_block = [&](Eigen::MatrixXcd& B) {
    if (!invariant) return;
    for (int j = 0; j < B.cols(); ++j) {
      for (int i = 0; i < sys.dim; ++i) tmp_in[i] = B(i, j);
      sys.apply_projector(tmp_in, tmp_out);
      for (int i = 0; i < sys.dim; ++i) B(i, j) = tmp_out[i];
    }
  };
  auto orthonormalize = [&](Eigen::MatrixXcd& B) {
    // rank-revealing: the projected block can be rank deficient when the
    // requested block exceeds rank(P)
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(B);
    qr.setThreshold(1e-10);
    int r = int(qr.rank());
    Eigen::MatrixXcd Q =
        qr.householderQ() * Eigen::MatrixXcd::Identity(sys.dim, std::min<int>(r, int(B.cols())));
    B = Q;
  };
  project_block(X);
  orthonormalize(X);

  Eigen::MatrixXcd Y;
  Eigen::VectorXd theta;
  Eigen::MatrixXcd ritz_vecs;
  const double res_tol = 1e-10 * sys.grid_n;
  for (int iter = 0; iter < 120; ++iter) {
    X = lu.solve(X).eval();
    project_block(X);
    orthonormalize(X);
    if (iter % 4 != 3 && iter != 119) continue;
    // Rayleigh-Ritz with D
    const int bcols = int(X.cols());
    Eigen::MatrixXcd DX(sys.dim, bcols);
    for (int j = 0; j < bcols; ++j) {
      for (int i = 0; i < sys.dim; ++i) tmp_in[i] = X(i, j);
      sys.apply(tmp_in, tmp_out);
      for (int i = 0; i < sys.dim; ++i) DX(i, j) = tmp_out[i];
    }
    Eigen::MatrixXcd H = X.adjoint() * DX;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs((H + H.adjoint()) * 0.5);
    theta = hs.eigenvalues();
    ritz_vecs = X * hs.eigenvectors();
    // convergence of the k smallest magnitudes
    std::vector<int> order(bcols);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a2, int b2) {
      return std::abs(theta(a2)) < std::abs(theta(b2));
    });
    bool done = true;
    Eigen::MatrixXcd DR = Eigen::MatrixXcd::Zero(sys.dim, 1);
    for (int t = 0; t < std::min(k, bcols) && done; ++t) {
      int j = order[t];
      for (int i = 0; i < sys.dim; ++i) tmp_in[i] = ritz_vecs(i, j);
      sys.apply(tmp_in, tmp_out);
      double num = 0;
      for (int i = 0; i < sys.dim; ++i)
        num += std::norm(tmp_out[i] - theta(j) * ritz_vecs(i, j));
      if (std::sqrt(num) > res_tol) done = false;
    }
    (void)DR;
    if (done) break;
  }

  const int ritz_cols = int(ritz_vecs.cols());
  std::vector<int> order(ritz_cols);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a2, int b2) {
    return std::abs(theta(a2)) < std::abs(theta(b2));
  });
  std::vector<std::pair<double, int>> chosen;
  for (int t = 0; t < std::min(k, ritz_cols); ++t) chosen.push_back({theta(order[t]), order[t]});
  std::sort(chosen.begin(), chosen.end());
  for (auto& [lam, j] : chosen) {
    for (int i = 0; i < sys.dim; ++i) tmp_in[i] = ritz_vecs(i, j);
    sys.apply(tmp_in, tmp_out);
    double num = 0;
    for (int i = 0; i < sys.dim; ++i) num += std::norm(tmp_out[i] - lam * tmp_in[i]);
    res.eigenvalues.push_back(lam);
    res.residuals.push_back(std::sqrt(num));
  }
  return res;
}

SpectrumResult invariant_spectrum(const DiracSystem& sys, int k) {
  return smallest_spectrum(sys, k, /*invariant=*/true);
}

SummabilityReport summability_estimate(const SpectrumResult& spec, int n, int grid_n,
                                       double band_fraction) {
  if (spec.eigenvalues.size() < 100)
    throw InsufficientSpectrum("need at least 100 eigenvalues");
  std::vector<double> mags;
  for (double l : spec.eigenvalues) mags.push_back(std::abs(l));
  std::sort(mags.begin(), mags.end());

  const double band_max = band_fraction * double(grid_n);
  SummabilityReport rep;
  rep.m_summable = n / 2 + 1;  // smallest m with 2m/n > 1

  // Midpoint-rank counting fit: one point per distinct magnitude shell at
  // (log midrank, log lambda); robust against the multiplicity staircase.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  int shells = 0;
  size_t i = 0;
  while (i < mags.size()) {
    size_t j = i;
    while (j < mags.size() && std::abs(mags[j] - mags[i]) <= 1e-9 * (1 + mags[i])) ++j;
    double lam = mags[i];
    if (lam > 1e-9 && lam <= band_max) {
      double x = std::log(0.5 * double(i + 1 + j));
      double y = std::log(lam);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++shells;
      cnt += int(j - i);
    }
    i = j;
  }
  rep.band_count = cnt;
  if (shells >= 2) {
    double denom = shells * sxx - sx * sx;
    rep.weyl_exponent = denom != 0 ? (shells * sxy - sx * sy) / denom : 0.0;
  }
  double tail = 0;
  for (double lam : mags) tail += std::pow(1.0 + lam * lam, -rep.m_summable);
  rep.tail_partial_sum = tail;
  return rep;
}

}  // namespace etale::dirac
