#pragma once

#include <array>
#include <complex>
#include <vector>

#include "etale/cohomology.hpp"
#include "etale/groupoid.hpp"

namespace etale::bundle {

using cohomology::SpinStructure;
using groupoid::GroupoidPresentation;

// Chart-grid indexing shared by the metric/connection fields.
struct ChartIndex {
  std::vector<std::vector<size_t>> points;              // chart -> global grid indices
  std::vector<std::unordered_map<size_t, int>> local;   // chart -> global -> local
  static ChartIndex build(const GroupoidPresentation& p);
};

struct NotACocycle : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BundleData {
  enum class Kind { Vector, AdjointClifford, Spinor };
  int rank = 1;
  Kind kind = Kind::Vector;
  std::vector<ExactMat> cocycle;  // per component
};

// Validates multiplicativity and unit action, then wraps the cocycle.
BundleData reconstruct_bundle(const GroupoidPresentation& p,
                              const std::vector<ExactMat>& cocycle, int rank,
                              BundleData::Kind kind = BundleData::Kind::Vector);

// Per-chart grid of fibre metrics.
using MetricField = std::vector<std::vector<ExactMat>>;

MetricField constant_metric(const GroupoidPresentation& p, const ChartIndex& idx,
                            const ExactMat& g);

// Haar/cutoff average of a seed metric; exactly invariant on grid points.
MetricField average_inner_product(const GroupoidPresentation& p, const ChartIndex& idx,
                                  const BundleData& bundle, const MetricField& seed);

// Residual of the invariance identity, exact arithmetic; zero iff invariant.
bool metric_is_invariant(const GroupoidPresentation& p, const ChartIndex& idx,
                         const BundleData& bundle, const MetricField& m);

// Connection coefficients: per chart, per point, one matrix per axis.
struct ConnectionData {
  std::vector<std::vector<std::array<ExactMat, kMaxDim>>> coeff;
  Rat hermitian_projection_distance_num;  // max |entry| moved by the projection (as rational magnitude bound)
};

ConnectionData zero_connection(const GroupoidPresentation& p, const ChartIndex& idx,
                               int rank);

// Prop-6 averaging for constant cocycles: A^I_i(x) = sum_sigma c(t sigma)
// sum_j (A_sigma)_{ji} rho(sigma)^{-1} A_j(phi x) rho(sigma).
ConnectionData average_connection(const GroupoidPresentation& p, const ChartIndex& idx,
                                  const BundleData& bundle, const ConnectionData& seed);

bool connection_is_invariant(const GroupoidPresentation& p, const ChartIndex& idx,
                             const BundleData& bundle, const ConnectionData& a);

// Projects coefficients onto the anti-selfadjoint part for the given constant
// fibre metric; returns the projection applied plus whether anything moved.
ConnectionData hermitian_projection(const GroupoidPresentation& p, const ChartIndex& idx,
                                    const ConnectionData& a, const ExactMat& fibre_metric,
                                    bool& moved);

struct UnsupportedDim : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CliffordModule {
  int n = 1;
  int dim = 1;                   // 2^floor(n/2)
  std::vector<ExactMat> gamma;   // hermitian, unitary, exact
  ExactMat omega;                // chirality (identity for odd n)
};

CliffordModule clifford_generators(int n);

// Spinor representation matrices of the lift, per component (n <= 2 exact).
std::vector<ExactMat> spin_action(const GroupoidPresentation& p, const SpinStructure& s,
                                  const CliffordModule& cl);

// n == 3 double-precision variant (even Clifford coefficients involve sqrt2).
std::vector<std::vector<std::complex<double>>> spin_action_d(
    const GroupoidPresentation& p, const SpinStructure& s, const CliffordModule& cl);

}  // namespace etale::bundle
