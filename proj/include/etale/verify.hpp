#pragma once

#include <complex>
#include <string>
#include <vector>

#include "etale/bundle.hpp"
#include "etale/dirac.hpp"
#include "etale/groupoid.hpp"

namespace etale::verify {

using dirac::DiracSystem;
using groupoid::GroupoidPresentation;
using kernels::cplx;

struct NotInvariant : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotEffective : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Orbit-space integration data: invariant partition functions, chart weights
// k_a / |Theta_a^a| and the volume density of the averaged metric.
struct OrbitMeasure {
  bundle::ChartIndex idx;
  std::vector<std::vector<Rat>> partition;  // rho_a per chart point, orbit-invariant
  std::vector<Rat> weight;                  // k_a / |Theta_a^a| per chart
  double volume_density = 1.0;              // sqrt(det gram)
};

OrbitMeasure orbit_measure(const GroupoidPresentation& p,
                           groupoid::BumpKind kind = groupoid::BumpKind::Tent);

// Integrates an invariant grid function over the orbit space.
double orbit_integral(const GroupoidPresentation& p, const OrbitMeasure& m,
                      const std::vector<double>& f);
cplx orbit_integral_c(const GroupoidPresentation& p, const OrbitMeasure& m,
                      const std::vector<cplx>& f);

// Checks invariance of a scalar grid function under every group element.
bool is_invariant_function(const GroupoidPresentation& p, const std::vector<cplx>& f,
                           double tol = 1e-12);

// L2 inner product of invariant spinor sections through the orbit integral.
cplx l2_inner_product(const GroupoidPresentation& p, const OrbitMeasure& m,
                      const DiracSystem& sys, const std::vector<cplx>& psi1,
                      const std::vector<cplx>& psi2);

// --- convolution algebra (Theorem 2 machinery) ------------------------------

// Element of C_c(Theta) for the underlying action groupoid, stored in the
// Cech presentation: one grid function per arrow component, parametrized by
// the source chart. Components sharing a group element must agree where their
// supports overlap (the descent condition back to the action groupoid).
struct ConvolutionElement {
  std::vector<std::vector<cplx>> values;  // [component][source chart local idx]
};

// Builds the element from per-group-element global grid functions.
ConvolutionElement element_from_group_functions(
    const GroupoidPresentation& p, const bundle::ChartIndex& idx,
    const std::vector<std::vector<cplx>>& f_of_group);

// Unit of the convolution product (identity group element, value one).
ConvolutionElement convolution_unit(const GroupoidPresentation& p,
                                    const bundle::ChartIndex& idx);

// Verifies the descent condition and extracts the group-function form.
std::vector<std::vector<cplx>> descend_to_group(const GroupoidPresentation& p,
                                                const bundle::ChartIndex& idx,
                                                const ConvolutionElement& f);

ConvolutionElement convolution_star(const GroupoidPresentation& p,
                                    const bundle::ChartIndex& idx,
                                    const ConvolutionElement& f,
                                    const ConvolutionElement& g);

// Representation on global-grid spinor sections ((6) of the source theory:
// (f psi)(x) = sum_{g} f_g(g^{-1}x) rho_s(g) psi(g^{-1} x)).
void convolution_action(const GroupoidPresentation& p, const bundle::ChartIndex& idx,
                        const DiracSystem& sys, const ConvolutionElement& f,
                        const std::vector<cplx>& psi, std::vector<cplx>& out);

// Effectiveness of the underlying action: distinct germs for distinct elements.
bool is_effective(const GroupoidPresentation& p);

// --- commutators -------------------------------------------------------------

struct CommutatorNorm {
  double norm = 0.0;            // power-iteration estimate of ||[D, f]||
  double lipschitz_bound = 0.0; // sup |grad f| in the averaged metric
  int iterations = 0;
};

CommutatorNorm commutator_norm(const GroupoidPresentation& p, const DiracSystem& sys,
                               const std::vector<cplx>& f, uint64_t seed = 0x5EED,
                               int max_iter = 200);

// Sampled invariant functions (orbit-summed Fourier modes), deterministic.
std::vector<std::vector<cplx>> sample_invariant_functions(
    const GroupoidPresentation& p, int count, uint64_t seed = 0x5EED);

// --- orientation cycles -------------------------------------------------------

struct OrientationResult {
  std::string description;
  double residual = 0.0;        // probe residual of sum a0 [D,a1]... - omega
  double boundary_residual = 0.0;  // Hochschild boundary spot check
};

// Coordinate-exponential cycle on unit tori (n = 1, 2); the normalization is
// the frozen discrete constant 2pi_N = N sin(2pi/N) per axis.
OrientationResult orientation_cycle(const GroupoidPresentation& p,
                                    const DiracSystem& sys);

// Best residual over cycles built from invariant algebra samples; on non-free
// quotients this stays bounded away from zero.
OrientationResult invariant_cycle_search(const GroupoidPresentation& p,
                                         const DiracSystem& sys, int samples = 6);

}  // namespace etale::verify
