#pragma once

#include "etale/groupoid.hpp"

// Shared presentation builders for the bundled geometries, at test-sized grids.
namespace fixtures {

using namespace etale;
using namespace etale::groupoid;

inline FlatBase base(int dim, int grid_n) {
  FlatBase b;
  b.dim = dim;
  b.grid_n = grid_n;
  b.lattice_basis = RatMat::identity(dim);
  b.gram = RatMat::identity(dim);
  return b;
}

inline GroupElem translation_1d(const Rat& t) {
  GroupElem g;
  g.a = IMat::identity(1);
  g.b = RatVec(1);
  g.b[0] = t;
  return g;
}

inline GroupElem reflection_1d() {
  GroupElem g;
  g.a = IMat(1);
  g.a.at(0, 0) = -1;
  g.b = RatVec(1);
  return g;
}

inline GroupElem mat2(long long a00, long long a01, long long a10, long long a11,
                      const Rat& b0 = Rat(0), const Rat& b1 = Rat(0)) {
  GroupElem g;
  g.a = IMat(2);
  g.a.at(0, 0) = a00; g.a.at(0, 1) = a01;
  g.a.at(1, 0) = a10; g.a.at(1, 1) = a11;
  g.b = RatVec(2);
  g.b[0] = b0; g.b[1] = b1;
  return g;
}

inline GroupoidPresentation unit_circle(int grid_n = 64, int boxes = 4) {
  CoverParams cov;
  cov.boxes_per_axis = boxes;
  return build_quotient_presentation({}, base(1, grid_n), cov);
}

inline GroupoidPresentation unit_torus2(int grid_n = 32, int boxes = 4) {
  CoverParams cov;
  cov.boxes_per_axis = boxes;
  return build_quotient_presentation({}, base(2, grid_n), cov);
}

inline GroupoidPresentation circle_z4(int grid_n = 64, int boxes = 4) {
  CoverParams cov;
  cov.boxes_per_axis = boxes;
  return build_quotient_presentation({translation_1d(Rat(1, 4))}, base(1, grid_n), cov);
}

inline GroupoidPresentation circle_reflect(int grid_n = 64, int boxes = 4) {
  CoverParams cov;
  cov.boxes_per_axis = boxes;
  return build_quotient_presentation({reflection_1d()}, base(1, grid_n), cov);
}

inline GroupoidPresentation klein_bottle(int grid_n = 32, int boxes = 4) {
  CoverParams cov;
  cov.boxes_per_axis = boxes;
  return build_quotient_presentation({mat2(1, 0, 0, -1, Rat(1, 2), Rat(0))},
                                     base(2, grid_n), cov);
}

inline GroupoidPresentation pillow_z2(int grid_n = 24, int boxes = 3) {
  CoverParams cov;
  cov.boxes_per_axis = boxes;
  return build_quotient_presentation({mat2(-1, 0, 0, -1)}, base(2, grid_n), cov);
}

inline GroupoidPresentation pillow_z4(int grid_n = 32, int boxes = 4) {
  CoverParams cov;
  cov.boxes_per_axis = boxes;
  return build_quotient_presentation({mat2(0, -1, 1, 0)}, base(2, grid_n), cov);
}

inline GroupoidPresentation hex_z3(int grid_n = 24, int boxes = 3) {
  CoverParams cov;
  cov.boxes_per_axis = boxes;
  return build_quotient_presentation({mat2(0, -1, 1, -1)}, base(2, grid_n), cov);
}

}  // namespace fixtures
