#include "etale/bundle.hpp"

namespace etale::bundle {

CliffordModule clifford_generators(int n) {
  if (n < 1 || n > 3) throw UnsupportedDim("clifford_generators supports n in {1,2,3}");
  CliffordModule cl;
  cl.n = n;
  cl.dim = n == 1 ? 1 : 2;

  auto pauli = [](int k) {
    ExactMat m(2);
    const Rat one(1);
    switch (k) {
      case 1:
        m.at(0, 1) = ExactC(one);
        m.at(1, 0) = ExactC(one);
        break;
      case 2:
        m.at(0, 1) = ExactC(Rat(0), Rat(-1));
        m.at(1, 0) = ExactC(Rat(0), Rat(1));
        break;
      default:
        m.at(0, 0) = ExactC(one);
        m.at(1, 1) = ExactC(-one);
    }
    return m;
  };

  if (n == 1) {
    ExactMat g(1);
    g.at(0, 0) = ExactC(Rat(1));
    cl.gamma = {g};
    cl.omega = g;  // odd n: unit operator
    return cl;
  }

  cl.gamma = {pauli(1), pauli(2)};
  if (n == 3) cl.gamma.push_back(pauli(3));

  if (n == 2) {
    // omega = i g1 g2, normalized so omega^2 = +1
    cl.omega = ExactC(Rat(0), Rat(1)) * (cl.gamma[0] * cl.gamma[1]);
  } else {
    cl.omega = ExactMat::identity(cl.dim);
  }
  return cl;
}

std::vector<ExactMat> spin_action(const GroupoidPresentation& p, const SpinStructure& s,
                                  const CliffordModule& cl) {
  if (s.n == 3) throw UnsupportedDim("use spin_action_d for n = 3");
  std::vector<ExactMat> out(p.components.size());
  for (const auto& comp : p.components) {
    ExactMat m(cl.dim);
    if (s.n == 1) {
      Rat sign = s.twist.empty() || !s.twist[comp.id] ? Rat(1) : Rat(-1);
      m.at(0, 0) = ExactC(sign);
    } else {
      // lambda * diag(e^{-2pi i t}, e^{+2pi i t}); this orientation makes
      // Ad(rho) gamma(u) = gamma(R(2t) u) with R counterclockwise
      Rat t = s.half_turn[comp.id];
      Rat ph = s.phase[comp.id];
      if (!s.twist.empty() && s.twist[comp.id]) ph = (ph + Rat(1, 2)).mod1();
      m.at(0, 0) = cohomology::exactc_of_turn(ph - t);
      m.at(1, 1) = cohomology::exactc_of_turn(ph + t);
    }
    out[comp.id] = std::move(m);
  }
  return out;
}

std::vector<std::vector<std::complex<double>>> spin_action_d(
    const GroupoidPresentation& p, const SpinStructure& s, const CliffordModule& cl) {
  if (s.n != 3) throw UnsupportedDim("spin_action_d is the n = 3 path");
  const double r2 = std::sqrt(2.0);
  auto q2d = [&](const cohomology::QSqrt2& q) {
    return q.a.to_double() + q.b.to_double() * r2;
  };
  // bivector images in the Pauli representation:
  // g1g2 = i s3, g1g3 = -i s2, g2g3 = i s1
  using C = std::complex<double>;
  auto mat = [&](C a, C b, C c, C d) { return std::vector<C>{a, b, c, d}; };
  const C I(0, 1);
  std::vector<std::vector<C>> biv = {
      mat(1, 0, 0, 1),   // 1
      mat(I, 0, 0, -I),  // g1g2
      mat(0, -1, 1, 0),  // g1g3
      mat(0, I, I, 0),   // g2g3
  };
  std::vector<std::vector<C>> out(p.components.size());
  for (const auto& comp : p.components) {
    std::vector<C> m(4, C(0));
    const auto& e = s.even[comp.id];
    for (int k = 0; k < 4; ++k) {
      double c = q2d(e.c[k]);
      for (int j = 0; j < 4; ++j) m[j] += c * biv[k][j];
    }
    if (!s.twist.empty() && s.twist[comp.id])
      for (auto& v : m) v = -v;
    out[comp.id] = std::move(m);
  }
  (void)cl;
  return out;
}

}  // namespace etale::bundle
