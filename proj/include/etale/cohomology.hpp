#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "etale/exactc.hpp"
#include "etale/gf2.hpp"
#include "etale/groupoid.hpp"

namespace etale::cohomology {

using groupoid::GroupoidPresentation;

// Indexed enumeration of the composable pairs (second, first); rows of every
// degree-2 object. Order is deterministic.
struct Nerve {
  std::vector<std::pair<int, int>> pairs;
  static Nerve build(const GroupoidPresentation& p);
};

// Z2 cochain of degree 0 (per chart), 1 (per component) or 2 (per pair).
struct Z2Cochain {
  int degree = 1;
  std::vector<uint8_t> values;
};

// Coboundary over Z2: deg0 -> deg1 is t* - s*; deg1 -> deg2 is
// c(tau) + c(sigma) + c(tau sigma).
Z2Cochain coboundary(const GroupoidPresentation& p, const Nerve& nerve,
                     const Z2Cochain& c);

struct ObstructionVerdict {
  bool trivial = false;
  Z2Cochain witness;              // degree k-1, valid when trivial
  std::vector<int> certificate;   // infeasible row subset when nontrivial
  int rank = 0;
  int unknowns = 0;
};

// Orthogonal structure cocycle of the tangent bundle in the Cholesky gauge of
// the averaged invariant metric. Exact values whenever the frame stays inside
// Q(sqrt3); the double mirror is always available.
struct StructureCocycle {
  RatMat gram;                   // invariant metric on torus coordinates
  bool exact = false;            // frame and values exact in Q(sqrt3)
  ExactMat frame;                // F = L^T  (G = L L^T)
  ExactMat frame_inv;
  std::vector<ExactMat> value;   // per component, orthogonal
  std::vector<int> det_sign;     // per component
  std::vector<int> chart_sign;   // orientation gauge exponent per chart (0/1)
  bool oriented = false;
  std::vector<Rat> turn;         // n==2 after orient(): rotation angle / 2pi in [0,1)
};

struct MetricMissing : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotOrientable : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotReduced : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedDim : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedPhase : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Averaged invariant metric from a constant seed; the flat presentations keep
// it constant over the grid, which is verified.
RatMat invariant_gram(const GroupoidPresentation& p, const RatMat& seed);

StructureCocycle structure_cocycle(const GroupoidPresentation& p);
StructureCocycle structure_cocycle(const GroupoidPresentation& p, const RatMat& gram);

// First Stiefel-Whitney obstruction: solve d(eps) = q(g) for chart signs.
ObstructionVerdict w1(const GroupoidPresentation& p, const StructureCocycle& g);

// Exhaustive oracle over all chart-sign assignments (<= 20 charts).
std::optional<std::vector<uint8_t>> w1_exhaustive(const GroupoidPresentation& p,
                                                  const StructureCocycle& g);

// Applies the witness gauge; result has det +1 on every component and, for
// n == 2, exact rotation turns.
StructureCocycle orient(const GroupoidPresentation& p, const StructureCocycle& g,
                        const Z2Cochain& w1_witness);

// a + b sqrt2, exact coefficient ring of the n=3 quarter-turn lifts.
struct QSqrt2 {
  Rat a, b;
  QSqrt2() = default;
  QSqrt2(Rat a_) : a(a_) {}
  QSqrt2(Rat a_, Rat b_) : a(a_), b(b_) {}
  friend QSqrt2 operator+(const QSqrt2& x, const QSqrt2& y) { return {x.a + y.a, x.b + y.b}; }
  friend QSqrt2 operator-(const QSqrt2& x, const QSqrt2& y) { return {x.a - y.a, x.b - y.b}; }
  friend QSqrt2 operator*(const QSqrt2& x, const QSqrt2& y) {
    return {x.a * y.a + Rat(2) * x.b * y.b, x.a * y.b + x.b * y.a};
  }
  QSqrt2 operator-() const { return {-a, -b}; }
  friend bool operator==(const QSqrt2& x, const QSqrt2& y) { return x.a == y.a && x.b == y.b; }
  bool is_zero() const { return a.is_zero() && b.is_zero(); }
};

// Even Clifford element for n = 3 over basis {1, g1g2, g1g3, g2g3}.
struct EvenCliff3 {
  std::array<QSqrt2, 4> c{};
  static EvenCliff3 one() { EvenCliff3 e; e.c[0] = QSqrt2(Rat(1)); return e; }
  friend EvenCliff3 operator*(const EvenCliff3& x, const EvenCliff3& y);
  EvenCliff3 operator-() const {
    EvenCliff3 e;
    for (int i = 0; i < 4; ++i) e.c[i] = -c[i];
    return e;
  }
  friend bool operator==(const EvenCliff3& x, const EvenCliff3& y) { return x.c == y.c; }
};

struct SpinStructure {
  int n = 2;
  bool projective = false;       // phase-corrected unitary lift (w2 was nontrivial)
  int phase_modulus = 2;
  // n == 2: spin element = turn in [0,1) with covering r = 2u; the projective
  // phase (turn units) multiplies the representation.
  std::vector<Rat> half_turn;
  std::vector<Rat> phase;
  // n == 3: exact even Clifford element per component (+-(1) per the GF2 witness).
  std::vector<EvenCliff3> even;
  std::vector<uint8_t> epsilon;  // defect-correcting cochain (labels the lift)
  std::vector<uint8_t> twist;    // Z2 1-cocycle: selects an inequivalent structure
};

using SpinResult = std::variant<SpinStructure, ObstructionVerdict>;

// Spin lift through the double cover; on failure returns the w2 verdict with
// an infeasibility certificate.
SpinResult spin_lift(const GroupoidPresentation& p, const StructureCocycle& so);

// Group-level exhaustive w2 oracle for global quotients: verifies the defect
// is constant on group-element pairs, then searches all 2^|G| sign patterns.
std::optional<bool> w2_group_exhaustive(const GroupoidPresentation& p,
                                        const StructureCocycle& so);

// Phase-corrected unitary lift over Z_{2m} phases; succeeds on Z2-type
// defects that trivialize over U(1) even when the genuine spin lift does not.
SpinResult projective_lift(const GroupoidPresentation& p, const StructureCocycle& so);

// Class-equality test for degree-1 Z2 cochains: solves c1 + c2 = d(eps).
ObstructionVerdict cohomologous(const GroupoidPresentation& p, const Z2Cochain& c1,
                                const Z2Cochain& c2);

// Representatives of H^1(X_bullet, Z2): Z2-valued 1-cocycles modulo
// coboundaries; index 0 is the trivial class. These label the inequivalent
// spin structures (twists).
std::vector<Z2Cochain> h1_z2_classes(const GroupoidPresentation& p);

// Multiplicativity replay: exact when the structure is exact.
bool spin_is_multiplicative(const GroupoidPresentation& p, const SpinStructure& s);

// Exact value of exp(2 pi i u) for twelfth turns; throws UnsupportedPhase.
ExactC exactc_of_turn(const Rat& u);

}  // namespace etale::cohomology
