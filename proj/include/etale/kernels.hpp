#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace etale::kernels {

using cplx = std::complex<double>;

// Execution policy for the data-parallel kernels. Every parallel variant
// partitions work by output row, so serial and parallel runs produce
// bit-identical results; tests compare them directly.
enum class Exec { Serial, Parallel };

struct Csr {
  int n = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<cplx> val;
};

void csr_apply(const Csr& m, const cplx* x, cplx* y, Exec exec);

inline void csr_apply(const Csr& m, const std::vector<cplx>& x, std::vector<cplx>& y,
                      Exec exec = Exec::Parallel) {
  y.resize(m.n);
  csr_apply(m, x.data(), y.data(), exec);
}

// y += a * x
void axpy(cplx a, const std::vector<cplx>& x, std::vector<cplx>& y, Exec exec);
// <x, y> with the first argument conjugated
cplx dot(const std::vector<cplx>& x, const std::vector<cplx>& y, Exec exec);
double nrm2(const std::vector<cplx>& x, Exec exec);
void scale(cplx a, std::vector<cplx>& x, Exec exec);

// Largest singular value of the operator given by `apply`, via power
// iteration on A* A with a deterministic seeded start vector.
struct PowerResult {
  double norm = 0.0;
  int iterations = 0;
};

template <typename ApplyFn, typename ApplyAdjFn>
PowerResult power_norm(int dim, ApplyFn&& apply, ApplyAdjFn&& apply_adj,
                       uint64_t seed, int max_iter = 200, double rtol = 1e-6) {
  std::vector<cplx> v(dim), w(dim), u(dim);
  // xorshift-seeded deterministic start
  uint64_t state = seed ? seed : 0x5EEDULL;
  auto next = [&state]() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return double(state % 1000003) / 1000003.0 - 0.5;
  };
  for (auto& z : v) z = cplx(next(), next());
  double nv = nrm2(v, Exec::Serial);
  if (nv == 0) return {};
  scale(1.0 / nv, v, Exec::Serial);

  double prev = 0.0;
  PowerResult res;
  for (int it = 0; it < max_iter; ++it) {
    apply(v, w);
    apply_adj(w, u);
    double nu = nrm2(u, Exec::Serial);
    res.iterations = it + 1;
    if (nu == 0) { res.norm = 0; return res; }
    double est = std::sqrt(nrm2(w, Exec::Serial) == 0 ? 0 : nu / 1.0);
    // Rayleigh estimate: ||A v||^2 growth; use sigma ~ sqrt(<v, A*A v>)
    double sigma = std::sqrt(std::abs(dot(v, u, Exec::Serial)));
    (void)est;
    scale(1.0 / nu, u, Exec::Serial);
    v.swap(u);
    res.norm = sigma;
    if (it > 4 && std::abs(sigma - prev) <= rtol * std::max(1.0, sigma)) break;
    prev = sigma;
  }
  return res;
}

}  // namespace etale::kernels
