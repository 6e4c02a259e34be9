#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "etale/rational.hpp"
#include "etale/smallmat.hpp"

namespace etale::groupoid {

// Flat torus base R^n / Z^n with an N-point grid per axis. Coordinates are
// torus units; the declared lattice enters through its Gram matrix only.
struct FlatBase {
  int dim = 1;
  int grid_n = 64;
  RatMat lattice_basis;  // columns = lattice vectors (informational)
  RatMat gram;           // metric on torus coordinates, symmetric positive definite
};

// Axis-aligned box in canonical lift coordinates: lo in [0,1), hi = lo + side.
struct Box {
  RatVec lo, hi;
  bool contains_lift(const RatVec& x) const {
    for (int i = 0; i < lo.n; ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
  }
};

struct Chart {
  int id = 0;
  Box box;
};

// Affine germ x -> a x + c acting on canonical lifts; c carries the integer
// translate that selects the connected component.
struct AffineGerm {
  IMat a;
  RatVec c;
  RatVec apply(const RatVec& x) const {
    RatVec y = a * x;
    for (int i = 0; i < y.n; ++i) y[i] += c[i];
    return y;
  }
  AffineGerm after(const AffineGerm& first) const {
    AffineGerm g;
    g.a = a * first.a;
    g.c = a * first.c;
    for (int i = 0; i < c.n; ++i) g.c[i] += c[i];
    return g;
  }
  AffineGerm inverse() const {
    AffineGerm g;
    g.a = a.inverse();
    RatVec mc(c.n);
    for (int i = 0; i < c.n; ++i) mc[i] = -c[i];
    g.c = g.a * mc;
    return g;
  }
  friend bool operator==(const AffineGerm& x, const AffineGerm& y) {
    return x.a == y.a && x.c == y.c;
  }
};

// Group element of the acting finite group: x -> a x + b with b in [0,1)^n.
struct GroupElem {
  IMat a;
  RatVec b;
  friend bool operator==(const GroupElem& x, const GroupElem& y) {
    return x.a == y.a && x.b == y.b;
  }
};

struct ArrowComponent {
  int id = 0;
  int src = 0;
  int tgt = 0;
  AffineGerm germ;
  int group_index = 0;          // index into GroupoidPresentation::group
  std::string group_label;
};

// Bitset over the global torus grid.
struct GridSet {
  std::vector<uint64_t> w;
  explicit GridSet(size_t npts = 0) : w((npts + 63) / 64, 0) {}
  void set(size_t j) { w[j / 64] |= uint64_t(1) << (j % 64); }
  bool get(size_t j) const { return (w[j / 64] >> (j % 64)) & 1; }
  bool intersects(const GridSet& o) const {
    for (size_t i = 0; i < w.size(); ++i)
      if (w[i] & o.w[i]) return true;
    return false;
  }
  size_t count() const {
    size_t c = 0;
    for (uint64_t x : w) c += __builtin_popcountll(x);
    return c;
  }
};

struct GroupoidPresentation {
  FlatBase base;
  std::vector<GroupElem> group;   // identity at index 0
  std::vector<Chart> charts;
  std::vector<ArrowComponent> components;
  std::vector<int> inverse;                    // component involution
  std::vector<GridSet> support;                // source grid points per component
  std::vector<GridSet> image;                  // target grid points per component
  std::unordered_map<uint64_t, int> compose_table;  // (second<<32|first) -> id
  std::unordered_map<uint64_t, int> unit_table;     // (src<<32|tgt) -> unit component id
  int boxes_per_axis = 0;
  Rat overlap;

  size_t grid_points() const {
    size_t p = 1;
    for (int i = 0; i < base.dim; ++i) p *= base.grid_n;
    return p;
  }
  // -1 when the pair is not composable.
  int compose(int second, int first) const {
    auto it = compose_table.find((uint64_t(second) << 32) | uint32_t(first));
    return it == compose_table.end() ? -1 : it->second;
  }
  bool is_unit(int comp) const {
    const auto& g = components[comp].germ;
    if (!(g.a == IMat::identity(base.dim))) return false;
    for (int i = 0; i < base.dim; ++i)
      if (!g.c[i].is_integer()) return false;
    return true;
  }
  // Grid index <-> multi-index helpers (axis 0 fastest).
  size_t flat(const IVec& j) const {
    size_t f = 0;
    for (int i = base.dim - 1; i >= 0; --i) f = f * base.grid_n + size_t(j[i]);
    return f;
  }
  IVec unflat(size_t f) const {
    IVec j(base.dim);
    for (int i = 0; i < base.dim; ++i) { j[i] = static_cast<long long>(f % base.grid_n); f /= base.grid_n; }
    return j;
  }
  RatVec grid_coord(size_t f) const {
    IVec j = unflat(f);
    RatVec x(base.dim);
    for (int i = 0; i < base.dim; ++i) x[i] = Rat(j[i], base.grid_n);
    return x;
  }
  // Canonical lift of a torus point into a box; nullopt when outside.
  std::optional<RatVec> lift_into(const RatVec& x, const Box& box) const {
    RatVec y(base.dim);
    for (int i = 0; i < base.dim; ++i) {
      Rat t = (x[i] - box.lo[i]).mod1();
      y[i] = box.lo[i] + t;
      if (y[i] > box.hi[i]) return std::nullopt;
    }
    return y;
  }
  // Torus grid index of a rational point whose coordinates lie on the grid.
  size_t torus_grid_index(const RatVec& x) const {
    IVec j(base.dim);
    for (int i = 0; i < base.dim; ++i) {
      Rat t = x[i].mod1() * Rat(base.grid_n);
      if (!t.is_integer()) throw std::domain_error("point off grid");
      j[i] = t.num();
    }
    return flat(j);
  }
  // Image of grid point x under the group element (mod 1).
  size_t act_grid(int gidx, size_t x) const {
    const GroupElem& g = group[gidx];
    RatVec y = g.a * grid_coord(x);
    for (int i = 0; i < base.dim; ++i) y[i] += g.b[i];
    return torus_grid_index(y);
  }
};

struct CutoffWeights {
  // values[chart][local grid offset]; local enumeration given by chart_points.
  std::vector<std::vector<Rat>> values;
  // global grid indices of each chart's points, aligned with values.
  std::vector<std::vector<size_t>> points;
};

struct CheckResult {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool ok() const {
    for (const auto& c : checks) if (!c.pass) return false;
    return true;
  }
};

struct CoverParams {
  int boxes_per_axis = 0;  // 0 = automatic
  Rat overlap = Rat(1, 4);
};

struct BuildError : std::runtime_error {
  explicit BuildError(const std::string& m) : std::runtime_error(m) {}
};
struct NonFiniteGroup : BuildError { using BuildError::BuildError; };
struct GridIncompatible : BuildError { using BuildError::BuildError; };
struct DegenerateBump : BuildError { using BuildError::BuildError; };

// Closes the generator list into a finite affine group mod 1 (identity first).
std::vector<GroupElem> close_group(const std::vector<GroupElem>& gens, int dim,
                                   int bound = 96);

GroupoidPresentation build_quotient_presentation(const std::vector<GroupElem>& generators,
                                                 const FlatBase& base,
                                                 const CoverParams& cover);

ValidationReport validate(const GroupoidPresentation& p);

// Isotropy at a grid point, localized to the lowest-id chart containing it:
// all components chart->chart whose germ fixes the point.
std::vector<int> isotropy(const GroupoidPresentation& p, size_t grid_index);

// Bump profile for cutoff/partition construction; both are exact rational
// partitions of unity per axis.
enum class BumpKind { Tent, Smoothstep };

CutoffWeights cutoff_weights(const GroupoidPresentation& p,
                             BumpKind kind = BumpKind::Tent);

GroupoidPresentation refine_cover(const GroupoidPresentation& p, int factor);

// Chart bump value at a lifted point (used by cutoff and orbit measures).
Rat bump_value(const GroupoidPresentation& p, int chart, const RatVec& lift,
               BumpKind kind);

// Visits every grid point of a chart as (global index, canonical lift).
void chart_points_visit(const GroupoidPresentation& p, int chart,
                        const std::function<void(size_t, const RatVec&)>& fn);

}  // namespace etale::groupoid
