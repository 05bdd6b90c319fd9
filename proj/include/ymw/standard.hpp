#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "ymw/forms.hpp"
#include "ymw/rng.hpp"

namespace ymw {

// Element of Lambda^- (x) su(2) as M_ab e_a^- (x) q_b, q = (i, j, k).
struct StandardTensor {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();

  static StandardTensor identity(double scale = 1.0) { return {scale * Eigen::Matrix3d::Identity()}; }
  static StandardTensor from_two_form(const TwoFormD& f) { return {coefficients(f, Duality::anti_self_dual)}; }
  TwoFormD two_form() const { return from_coefficients(m, Duality::anti_self_dual); }
};

struct StandardCheck {
  bool standard = false;
  double scale = 0.0;     // lambda with M^T M = lambda^2 I
  double deviation = 0.0; // |M^T M - lambda^2 I| / lambda^2
};

// M^T M must be a non-negative multiple of the identity.
inline StandardCheck is_standard(const Eigen::Matrix3d& m, double tol = 1e-9) {
  const Eigen::Matrix3d g = m.transpose() * m;
  const double l2 = g.trace() / 3.0;
  StandardCheck out;
  out.scale = std::sqrt(std::max(l2, 0.0));
  if (l2 <= 0.0) {
    out.standard = true;
    return out;
  }
  out.deviation = (g - l2 * Eigen::Matrix3d::Identity()).norm() / l2;
  out.standard = out.deviation <= tol;
  return out;
}

inline StandardCheck is_standard(const StandardTensor& xi, double tol = 1e-9) { return is_standard(xi.m, tol); }

inline double inner(const StandardTensor& a, const StandardTensor& b) { return inner(a.two_form(), b.two_form()); }

// <xi, ad_sigma xi'>.
inline double ad_pairing(const StandardTensor& xi, const StandardTensor& xi2, const Quat& sigma) {
  return inner(xi.two_form(), ad(sigma, xi2.two_form()));
}

// Normalized max(|<xi,xi'>|, max_sigma |<xi, ad_sigma xi'>|) over sigma in {i, j, k}.
inline double lemma65_oracle(const StandardTensor& xi, const StandardTensor& xi2) {
  const StandardCheck c1 = is_standard(xi, 1e-6), c2 = is_standard(xi2, 1e-6);
  if (c1.scale == 0.0 || c2.scale == 0.0) throw DegenerateInput("standard tensor has zero scale");
  const TwoFormD f = xi.two_form(), g = xi2.two_form();
  double best = std::abs(inner(f, g));
  for (int s = 1; s <= 3; ++s) best = std::max(best, std::abs(inner(f, ad(Quat::basis(s), g))));
  return best / std::sqrt(norm2(f) * norm2(g));
}

// scale * O with O Haar-orthogonal, det +-1 with equal odds, scale in [0.5, 2].
inline StandardTensor random_standard(CounterRng& rng) {
  Eigen::Matrix3d o = rng.orthogonal3();
  if (rng.uniform() < 0.5) o.col(0) *= -1.0;
  return {rng.uniform(0.5, 2.0) * o};
}

// Q diag(+-1) Q^T: symmetric and orthogonal.
inline Eigen::Matrix3d random_symmetric_orthogonal(CounterRng& rng) {
  const Eigen::Matrix3d q = rng.orthogonal3();
  Eigen::Vector3d s;
  for (int i = 0; i < 3; ++i) s(i) = rng.uniform() < 0.5 ? -1.0 : 1.0;
  return q * s.asDiagonal() * q.transpose();
}

}  // namespace ymw
