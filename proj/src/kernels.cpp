#include "etale/kernels.hpp"

#include <cmath>

namespace etale::kernels {

void csr_apply(const Csr& m, const cplx* x, cplx* y, Exec exec) {
  const int n = m.n;
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < n; ++r) {
      cplx acc(0.0, 0.0);
      for (int k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
        acc += m.val[k] * x[m.col[k]];
      y[r] = acc;
    }
  } else {
    for (int r = 0; r < n; ++r) {
      cplx acc(0.0, 0.0);
      for (int k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
        acc += m.val[k] * x[m.col[k]];
      y[r] = acc;
    }
  }
}

void axpy(cplx a, const std::vector<cplx>& x, std::vector<cplx>& y, Exec exec) {
  const int n = int(x.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) y[i] += a * x[i];
  } else {
    for (int i = 0; i < n; ++i) y[i] += a * x[i];
  }
}

cplx dot(const std::vector<cplx>& x, const std::vector<cplx>& y, Exec exec) {
  const int n = int(x.size());
  double re = 0, im = 0;
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static) reduction(+ : re, im)
    for (int i = 0; i < n; ++i) {
      cplx t = std::conj(x[i]) * y[i];
      re += t.real();
      im += t.imag();
    }
  } else {
    for (int i = 0; i < n; ++i) {
      cplx t = std::conj(x[i]) * y[i];
      re += t.real();
      im += t.imag();
    }
  }
  return {re, im};
}

double nrm2(const std::vector<cplx>& x, Exec exec) {
  const int n = int(x.size());
  double s = 0;
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static) reduction(+ : s)
    for (int i = 0; i < n; ++i) s += std::norm(x[i]);
  } else {
    for (int i = 0; i < n; ++i) s += std::norm(x[i]);
  }
  return std::sqrt(s);
}

void scale(cplx a, std::vector<cplx>& x, Exec exec) {
  const int n = int(x.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) x[i] *= a;
  } else {
    for (int i = 0; i < n; ++i) x[i] *= a;
  }
}

}  // namespace etale::kernels
