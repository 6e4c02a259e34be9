#pragma once

#include <complex>
#include <string>
#include <vector>

#include "etale/bundle.hpp"
#include "etale/cohomology.hpp"
#include "etale/groupoid.hpp"
#include "etale/kernels.hpp"

namespace etale::dirac {

using bundle::CliffordModule;
using cohomology::SpinStructure;
using cohomology::StructureCocycle;
using groupoid::GroupoidPresentation;
using kernels::cplx;

struct NotSpin : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotOrientable : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ProjectorNotCommuting : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InsufficientSpectrum : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedTwist : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One first-order stencil leg: central difference along an integer direction
// with a constant exact spinor coefficient (the -i/(2h) factor included).
struct StencilTerm {
  IVec direction;
  ExactMat coeff;
};

// Global-grid action of one group element on spinor sections:
// (U psi)(x) = rho^{-1} psi(g x).
struct GroupAction {
  int group_index = 0;
  std::vector<int> perm;   // x -> flat index of g*x
  ExactMat rho_inv;        // exact spinor factor
};

struct DiracSystem {
  int n = 1;                     // base dimension
  int grid_n = 0;
  int spinor_dim = 1;
  size_t grid_points = 0;
  int dim = 0;                   // grid_points * spinor_dim
  std::vector<StencilTerm> stencil;      // positive direction representatives
  std::array<int, kMaxDim> boundary_sign{1, 1, 1};  // spin-structure twist per axis
  std::vector<GroupAction> actions;      // one per group element (identity first)
  ExactMat omega;                        // chirality on the spinor factor
  double presymmetrization_defect = 0.0;
  std::string metadata;
  bool projective_lift = false;

  size_t flat(const IVec& j) const {
    size_t f = 0;
    for (int i = n - 1; i >= 0; --i) f = f * grid_n + size_t(j[i]);
    return f;
  }
  IVec unflat(size_t f) const {
    IVec j(n);
    for (int i = 0; i < n; ++i) { j[i] = (long long)(f % grid_n); f /= grid_n; }
    return j;
  }
  // Neighbor index with the twist sign picked up on wrap-around links.
  std::pair<size_t, int> step(size_t x, const IVec& dir, int orientation) const;

  kernels::Csr to_csr() const;
  // Matrix-free application of D.
  void apply(const cplx* in, cplx* out, kernels::Exec exec) const;
  void apply(const std::vector<cplx>& in, std::vector<cplx>& out,
             kernels::Exec exec = kernels::Exec::Parallel) const;
  // Application of the invariant projector P = (1/|G|) sum U_g.
  void apply_projector(const std::vector<cplx>& in, std::vector<cplx>& out,
                       kernels::Exec exec = kernels::Exec::Parallel) const;
  // Chirality operator action.
  void apply_omega(const std::vector<cplx>& in, std::vector<cplx>& out) const;
};

// Assembles the invariant Dirac operator. The structure cocycle fixes the
// frame; the spin structure supplies the per-component lift (and twists); the
// connection must already be invariant (zero for the bundled fixtures).
DiracSystem assemble_dirac(const GroupoidPresentation& p, const StructureCocycle& so,
                           const SpinStructure& s, const CliffordModule& cl);

// Exact certificates --------------------------------------------------------

struct CommuteReport {
  bool exact_zero = true;                  // all structural defects vanish
  std::vector<int> offending_components;   // named when nonzero
  double matrix_probe_residual = 0.0;      // double-precision spot check
};

// Verifies U_sigma D U_sigma^{-1} = D per component and [D, P] = 0, in exact
// arithmetic (stencil transport + coefficient conjugation + twist bookkeeping).
CommuteReport commute_check(const GroupoidPresentation& p, const DiracSystem& sys,
                            const std::vector<ExactMat>& spin_rep);

// Brute-force exact matrix conjugation check (small grids; validates the
// structural decomposition used by commute_check).
bool brute_force_equivariance(const GroupoidPresentation& p, const DiracSystem& sys,
                              const std::vector<ExactMat>& spin_rep, int component);

// Exact [D, P] = 0 as block matrices.
bool commutes_with_projector_exact(const DiracSystem& sys);

// Spectra --------------------------------------------------------------------

struct SpectrumResult {
  std::vector<double> eigenvalues;   // sorted ascending
  std::vector<double> residuals;     // ||D v - lambda v|| per pair
  std::string subspace;              // "full" or "invariant"
};

// Dense Hermitian eigensolve (LAPACK zheevd when available, Eigen otherwise).
void dense_hermitian_eig(int n, std::vector<cplx>& a /* row major, overwritten */,
                         std::vector<double>& eigenvalues);

// Full spectrum via dense solve; fills residuals.
SpectrumResult full_spectrum_dense(const DiracSystem& sys);

// Orthonormal basis of range(P) from orbit-symmetrized delta sections.
std::vector<std::vector<cplx>> invariant_basis(const DiracSystem& sys);

// k smallest-magnitude eigenvalues of D restricted to range(P).
// Dense path for moderate dimensions, shift-invert Lanczos above.
SpectrumResult invariant_spectrum(const DiracSystem& sys, int k);

// Full-space spectrum of the smallest k magnitudes (dense or Lanczos).
SpectrumResult smallest_spectrum(const DiracSystem& sys, int k, bool invariant,
                                 int dense_limit = 6000);

struct SummabilityReport {
  double weyl_exponent = 0.0;
  int m_summable = 0;
  double tail_partial_sum = 0.0;   // sum of (1 + lambda^2)^{-m} over the band
  int band_count = 0;
};

// Least squares fit of log|lambda_k| against (1/n) log k over the resolved
// band (|lambda| below band_fraction / h, where the sine distortion is small).
SummabilityReport summability_estimate(const SpectrumResult& spec, int n, int grid_n,
                                       double band_fraction = 0.45);

}  // namespace etale::dirac
