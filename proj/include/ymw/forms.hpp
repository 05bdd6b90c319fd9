#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>

#include "ymw/quat.hpp"

namespace ymw {

template <typename Scalar>
using Vec4 = Eigen::Matrix<Scalar, 4, 1>;
using Point = Vec4<double>;

// Position of dx^mu ^ dx^nu (mu < nu) in the order 12,13,14,23,24,34.
constexpr int pair_index(int mu, int nu) {
  constexpr int table[4][4] = {{-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};
  return table[mu][nu];
}
constexpr std::array<std::array<int, 2>, 6> kPairs = {{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

template <typename Scalar>
struct OneForm {
  std::array<Quaternion<Scalar>, 4> c{};

  Quaternion<Scalar>& operator[](int mu) { return c[mu]; }
  const Quaternion<Scalar>& operator[](int mu) const { return c[mu]; }

  OneForm& operator+=(const OneForm& o) {
    for (int i = 0; i < 4; ++i) c[i] += o.c[i];
    return *this;
  }
  OneForm& operator-=(const OneForm& o) {
    for (int i = 0; i < 4; ++i) c[i] -= o.c[i];
    return *this;
  }
  OneForm& operator*=(Scalar s) {
    for (auto& q : c) q *= s;
    return *this;
  }
  friend OneForm operator+(OneForm a, const OneForm& b) { return a += b; }
  friend OneForm operator-(OneForm a, const OneForm& b) { return a -= b; }
  friend OneForm operator*(OneForm a, Scalar s) { return a *= s; }
  friend OneForm operator*(Scalar s, OneForm a) { return a *= s; }
};

template <typename Scalar>
struct TwoForm {
  std::array<Quaternion<Scalar>, 6> c{};

  Quaternion<Scalar>& operator[](int p) { return c[p]; }
  const Quaternion<Scalar>& operator[](int p) const { return c[p]; }

  // Antisymmetric accessor F_{mu nu}.
  Quaternion<Scalar> operator()(int mu, int nu) const {
    if (mu == nu) return {};
    return mu < nu ? c[pair_index(mu, nu)] : -c[pair_index(mu, nu)];
  }

  TwoForm& operator+=(const TwoForm& o) {
    for (int i = 0; i < 6; ++i) c[i] += o.c[i];
    return *this;
  }
  TwoForm& operator-=(const TwoForm& o) {
    for (int i = 0; i < 6; ++i) c[i] -= o.c[i];
    return *this;
  }
  TwoForm& operator*=(Scalar s) {
    for (auto& q : c) q *= s;
    return *this;
  }
  friend TwoForm operator+(TwoForm a, const TwoForm& b) { return a += b; }
  friend TwoForm operator-(TwoForm a, const TwoForm& b) { return a -= b; }
  friend TwoForm operator-(TwoForm a) { return a *= Scalar(-1); }
  friend TwoForm operator*(TwoForm a, Scalar s) { return a *= s; }
  friend TwoForm operator*(Scalar s, TwoForm a) { return a *= s; }
};

// Real 3-form on the basis dx234, dx134, dx124, dx123.
template <typename Scalar>
struct ThreeForm {
  Vec4<Scalar> c = Vec4<Scalar>::Zero();

  // Vector W with  int_{boundary} omega = int W . n dS.
  Vec4<Scalar> flux_vector() const { return {c(0), -c(1), c(2), -c(3)}; }

  // omega(t1, t2, t3).
  Scalar evaluate(const Vec4<Scalar>& t1, const Vec4<Scalar>& t2, const Vec4<Scalar>& t3) const {
    Eigen::Matrix<Scalar, 4, 3> t;
    t << t1, t2, t3;
    Scalar s = 0;
    for (int omit = 0; omit < 4; ++omit) {
      Eigen::Matrix<Scalar, 3, 3> m;
      for (int r = 0, k = 0; r < 4; ++r)
        if (r != omit) m.row(k++) = t.row(r);
      s += c(omit) * m.determinant();
    }
    return s;
  }
};

using OneFormD = OneForm<double>;
using TwoFormD = TwoForm<double>;
using ThreeFormD = ThreeForm<double>;

// Real 2-form coefficients in the pair order.
template <typename Scalar>
using RealTwoForm = Eigen::Matrix<Scalar, 6, 1>;

template <typename Scalar>
TwoForm<Scalar> hodge_star(const TwoForm<Scalar>& f) {
  TwoForm<Scalar> s;
  s[pair_index(2, 3)] = f[pair_index(0, 1)];
  s[pair_index(0, 1)] = f[pair_index(2, 3)];
  s[pair_index(1, 3)] = -f[pair_index(0, 2)];
  s[pair_index(0, 2)] = -f[pair_index(1, 3)];
  s[pair_index(1, 2)] = f[pair_index(0, 3)];
  s[pair_index(0, 3)] = f[pair_index(1, 2)];
  return s;
}

template <typename Scalar>
TwoForm<Scalar> sd_part(const TwoForm<Scalar>& f) {
  return (f + hodge_star(f)) * Scalar(0.5);
}

template <typename Scalar>
TwoForm<Scalar> asd_part(const TwoForm<Scalar>& f) {
  return (f - hodge_star(f)) * Scalar(0.5);
}

// Pointwise inner product sum_{mu<nu} <F_{mu nu}, G_{mu nu}>.
template <typename Scalar>
Scalar inner(const TwoForm<Scalar>& f, const TwoForm<Scalar>& g) {
  Scalar s = 0;
  for (int p = 0; p < 6; ++p) s += su2_inner(f[p], g[p]);
  return s;
}

template <typename Scalar>
Scalar norm2(const TwoForm<Scalar>& f) {
  return inner(f, f);
}

template <typename Scalar>
Scalar inner(const OneForm<Scalar>& a, const OneForm<Scalar>& b) {
  Scalar s = 0;
  for (int mu = 0; mu < 4; ++mu) s += su2_inner(a[mu], b[mu]);
  return s;
}

template <typename Scalar>
Scalar norm2(const OneForm<Scalar>& a) {
  return inner(a, a);
}

// e1 = dx12 - dx34, e2 = dx13 + dx24, e3 = dx14 - dx23.
template <typename Scalar = double>
RealTwoForm<Scalar> asd_basis(int a) {
  RealTwoForm<Scalar> e = RealTwoForm<Scalar>::Zero();
  switch (a) {
    case 0: e(pair_index(0, 1)) = 1; e(pair_index(2, 3)) = -1; break;
    case 1: e(pair_index(0, 2)) = 1; e(pair_index(1, 3)) = 1; break;
    default: e(pair_index(0, 3)) = 1; e(pair_index(1, 2)) = -1; break;
  }
  return e;
}

// e1 = dx12 + dx34, e2 = dx13 - dx24, e3 = dx14 + dx23.
template <typename Scalar = double>
RealTwoForm<Scalar> sd_basis(int a) {
  RealTwoForm<Scalar> e = RealTwoForm<Scalar>::Zero();
  switch (a) {
    case 0: e(pair_index(0, 1)) = 1; e(pair_index(2, 3)) = 1; break;
    case 1: e(pair_index(0, 2)) = 1; e(pair_index(1, 3)) = -1; break;
    default: e(pair_index(0, 3)) = 1; e(pair_index(1, 2)) = 1; break;
  }
  return e;
}

// omega (x) q.
template <typename Scalar>
TwoForm<Scalar> tensor(const RealTwoForm<Scalar>& omega, const Quaternion<Scalar>& q) {
  TwoForm<Scalar> f;
  for (int p = 0; p < 6; ++p) f[p] = q * omega(p);
  return f;
}

enum class Duality { self_dual, anti_self_dual };

// F = sum_ab M_ab e_a (x) q_b with q = (i, j, k) and e the chosen basis.
template <typename Scalar>
TwoForm<Scalar> from_coefficients(const Eigen::Matrix<Scalar, 3, 3>& m, Duality type) {
  TwoForm<Scalar> f;
  for (int a = 0; a < 3; ++a) {
    const RealTwoForm<Scalar> e = type == Duality::self_dual ? sd_basis<Scalar>(a) : asd_basis<Scalar>(a);
    for (int b = 0; b < 3; ++b) f += tensor(e, Quaternion<Scalar>::basis(b + 1)) * m(a, b);
  }
  return f;
}

// Inverse of from_coefficients on the chosen half (the other half is discarded).
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> coefficients(const TwoForm<Scalar>& f, Duality type) {
  Eigen::Matrix<Scalar, 3, 3> m;
  for (int a = 0; a < 3; ++a) {
    const RealTwoForm<Scalar> e = type == Duality::self_dual ? sd_basis<Scalar>(a) : asd_basis<Scalar>(a);
    Eigen::Matrix<Scalar, 3, 1> acc = Eigen::Matrix<Scalar, 3, 1>::Zero();
    for (int p = 0; p < 6; ++p) acc += e(p) * f[p].vec();
    m.row(a) = acc.transpose() / Scalar(2);
  }
  return m;
}

// (a ^ b)_{mu nu} = a_mu b_nu - a_nu b_mu with quaternion products.
template <typename Scalar>
TwoForm<Scalar> wedge(const OneForm<Scalar>& a, const OneForm<Scalar>& b) {
  TwoForm<Scalar> f;
  for (int p = 0; p < 6; ++p) {
    const int mu = kPairs[p][0], nu = kPairs[p][1];
    f[p] = a[mu] * b[nu] - a[nu] * b[mu];
  }
  return f;
}

// Tr(F ^ a).
template <typename Scalar>
ThreeForm<Scalar> wedge_trace(const TwoForm<Scalar>& f, const OneForm<Scalar>& a) {
  ThreeForm<Scalar> w;
  for (int p = 0; p < 6; ++p) {
    const int mu = kPairs[p][0], nu = kPairs[p][1];
    for (int rho = 0; rho < 4; ++rho) {
      if (rho == mu || rho == nu) continue;
      // dx^mu dx^nu dx^rho = sign * dx^{sorted}, sign from moving rho into place.
      const Scalar sign = (rho < mu || rho > nu) ? Scalar(1) : Scalar(-1);
      const int omit = 6 - mu - nu - rho;
      w.c(omit) += sign * trace_product(f[p], a[rho]);
    }
  }
  return w;
}

// Jacobian d(x/|x|^2)^alpha / dx^mu.
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 4> inversion_jacobian(const Vec4<Scalar>& x) {
  const Scalar r2 = x.squaredNorm();
  if (r2 == Scalar(0)) throw OriginSingularity("inversion is undefined at the origin");
  return (Eigen::Matrix<Scalar, 4, 4>::Identity() - Scalar(2) * x * x.transpose() / r2) / r2;
}

template <typename Scalar>
Vec4<Scalar> inversion(const Vec4<Scalar>& x) {
  const Scalar r2 = x.squaredNorm();
  if (r2 == Scalar(0)) throw OriginSingularity("inversion is undefined at the origin");
  return x / r2;
}

// (phi^* F)_{mu nu} = J_{alpha mu} J_{beta nu} F_{alpha beta}, F taken at phi(x).
template <typename Scalar>
TwoForm<Scalar> pullback(const TwoForm<Scalar>& f, const Eigen::Matrix<Scalar, 4, 4>& jac) {
  TwoForm<Scalar> g;
  for (int p = 0; p < 6; ++p) {
    const int mu = kPairs[p][0], nu = kPairs[p][1];
    Quaternion<Scalar> acc;
    for (int q = 0; q < 6; ++q) {
      const int al = kPairs[q][0], be = kPairs[q][1];
      acc += f[q] * (jac(al, mu) * jac(be, nu) - jac(be, mu) * jac(al, nu));
    }
    g[p] = acc;
  }
  return g;
}

template <typename Scalar>
OneForm<Scalar> pullback(const OneForm<Scalar>& a, const Eigen::Matrix<Scalar, 4, 4>& jac) {
  OneForm<Scalar> b;
  for (int mu = 0; mu < 4; ++mu)
    for (int al = 0; al < 4; ++al) b[mu] += a[al] * jac(al, mu);
  return b;
}

// Pullback of a constant 2-form under the inversion, evaluated at x.
template <typename Scalar>
TwoForm<Scalar> inversion_pullback(const TwoForm<Scalar>& d, const Vec4<Scalar>& x) {
  return pullback(d, inversion_jacobian(x));
}

// Lie-leg adjoint action [sigma, F].
template <typename Scalar>
TwoForm<Scalar> ad(const Quaternion<Scalar>& sigma, const TwoForm<Scalar>& f) {
  TwoForm<Scalar> g;
  for (int p = 0; p < 6; ++p) g[p] = commutator(sigma, f[p]);
  return g;
}

// Conjugation g F g^{-1} on the Lie leg.
template <typename Scalar>
TwoForm<Scalar> adjoint_action(const Quaternion<Scalar>& g, const TwoForm<Scalar>& f) {
  const Quaternion<Scalar> gi = g.inverse();
  TwoForm<Scalar> h;
  for (int p = 0; p < 6; ++p) h[p] = g * f[p] * gi;
  return h;
}

// Derivation action of a skew generator S on the form leg:
// (S.F)_{mu nu} = S_{alpha mu} F_{alpha nu} + S_{alpha nu} F_{mu alpha}.
template <typename Scalar>
TwoForm<Scalar> form_rotation(const Eigen::Matrix<Scalar, 4, 4>& s, const TwoForm<Scalar>& f) {
  TwoForm<Scalar> g;
  for (int p = 0; p < 6; ++p) {
    const int mu = kPairs[p][0], nu = kPairs[p][1];
    Quaternion<Scalar> acc;
    for (int al = 0; al < 4; ++al) acc += f(al, nu) * s(al, mu) + f(mu, al) * s(al, nu);
    g[p] = acc;
  }
  return g;
}

}  // namespace ymw
