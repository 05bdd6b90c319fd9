#include "doctest.h"

#include "ymw/forms.hpp"
#include "ymw/obstruction.hpp"
#include "ymw/rng.hpp"
#include "ymw/standard.hpp"

using namespace ymw;

namespace {

TwoFormD random_two_form(CounterRng& rng) {
  TwoFormD f;
  for (int p = 0; p < 6; ++p) f[p] = rng.imag_quat();
  return f;
}

double dist(const TwoFormD& a, const TwoFormD& b) { return std::sqrt(norm2(a - b)); }

}  // namespace

TEST_CASE("Hodge star is an involution with the basis conventions") {
  CounterRng rng(1);
  const TwoFormD f = random_two_form(rng);
  CHECK(dist(hodge_star(hodge_star(f)), f) == 0.0);
  CHECK(dist(sd_part(f) + asd_part(f), f) < 1e-15);
  CHECK(std::abs(inner(sd_part(f), asd_part(f))) < 1e-14);
  for (int a = 0; a < 3; ++a) {
    const Quat q(0, 1, 0, 0);
    const TwoFormD s = tensor(sd_basis(a), q), m = tensor(asd_basis(a), q);
    CHECK(dist(hodge_star(s), s) == 0.0);
    CHECK(dist(hodge_star(m), -m) == 0.0);
  }
}

TEST_CASE("coefficients invert from_coefficients on each half") {
  CounterRng rng(2);
  Eigen::Matrix3d m;
  for (int i = 0; i < 9; ++i) m(i) = rng.normal();
  for (Duality d : {Duality::self_dual, Duality::anti_self_dual}) {
    const TwoFormD f = from_coefficients(m, d);
    CHECK((coefficients(f, d) - m).norm() < 1e-14);
    const Duality other = d == Duality::self_dual ? Duality::anti_self_dual : Duality::self_dual;
    CHECK(coefficients(f, other).norm() < 1e-14);
    // |e_a (x) q_b|^2 = 2 * 2.
    CHECK(norm2(f) == doctest::Approx(4.0 * m.squaredNorm()));
  }
}

TEST_CASE("wedge of coordinate one-forms") {
  OneFormD a, b;
  a[0] = Quat(1);
  b[1] = Quat(0, 1, 0, 0);
  const TwoFormD w = wedge(a, b);
  CHECK(w[pair_index(0, 1)] == Quat(0, 1, 0, 0));
  for (int p = 1; p < 6; ++p) CHECK(w[p] == Quat());
}

TEST_CASE("wedge_trace of dx12 (x) i with dx3 (x) i is Tr(i i) dx123") {
  TwoFormD f;
  f[pair_index(0, 1)] = Quat(0, 1, 0, 0);
  OneFormD a;
  a[2] = Quat(0, 1, 0, 0);
  const ThreeFormD w = wedge_trace(f, a);
  CHECK(w.c(3) == doctest::Approx(-2.0));
  CHECK(w.c(0) == 0.0);
}

TEST_CASE("inversion pullback reverses duality") {
  CounterRng rng(4);
  Eigen::Matrix3d m;
  for (int i = 0; i < 9; ++i) m(i) = rng.normal();
  const TwoFormD d = from_coefficients(m, Duality::anti_self_dual);
  for (int n = 0; n < 20; ++n) {
    const Point x = rng.in_ball(2.0);
    const TwoFormD p = inversion_pullback(d, x);
    CHECK(std::sqrt(norm2(asd_part(p))) < 1e-12 * std::sqrt(norm2(p)));
  }
  CHECK_THROWS_AS(inversion_pullback(d, Point(Point::Zero())), OriginSingularity);
}

TEST_CASE("inversion is an involution with Jacobian of determinant -1/r^8") {
  CounterRng rng(6);
  for (int n = 0; n < 20; ++n) {
    const Point x = rng.in_ball(3.0);
    CHECK((inversion(inversion(x)) - x).norm() < 1e-12 * x.norm());
    const double r2 = x.squaredNorm();
    CHECK(inversion_jacobian(x).determinant() == doctest::Approx(-1.0 / std::pow(r2, 4)).epsilon(1e-10));
  }
}

TEST_CASE("self-dual rotations act trivially on anti-self-dual forms") {
  CounterRng rng(8);
  const TwoFormD f = asd_part(random_two_form(rng));
  for (int a = 0; a < 3; ++a) {
    CHECK(std::sqrt(norm2(form_rotation(sd_rotation(a), f))) < 1e-14);
    CHECK(std::sqrt(norm2(form_rotation(asd_rotation(a), f))) > 1e-3);
  }
}

TEST_CASE("adjoint action preserves the norm and ad is its derivative") {
  CounterRng rng(9);
  const TwoFormD f = random_two_form(rng);
  const Quat g = rng.unit_quat();
  CHECK(norm2(adjoint_action(g, f)) == doctest::Approx(norm2(f)).epsilon(1e-13));
  const Quat s = rng.imag_quat();
  const double h = 1e-6;
  const TwoFormD fd = (adjoint_action(unit_exp(s * h), f) - adjoint_action(unit_exp(s * -h), f)) * (0.5 / h);
  CHECK(dist(fd, ad(s, f)) < 1e-8);
}

TEST_CASE("is_standard detects scaled orthogonal matrices") {
  CounterRng rng(10);
  for (int n = 0; n < 50; ++n) {
    const Eigen::Matrix3d o = rng.orthogonal3();
    const StandardCheck c = is_standard(3.0 * o);
    CHECK(c.standard);
    CHECK(c.scale == doctest::Approx(3.0));
    Eigen::Matrix3d skew = o;
    skew(0, 0) += 0.1;
    CHECK_FALSE(is_standard(skew, 1e-6).standard);
  }
}

TEST_CASE("pairing oracle is positive on standard tensors") {
  CounterRng rng(12);
  for (int n = 0; n < 500; ++n) {
    const StandardTensor a = random_standard(rng), b = random_standard(rng);
    const double v = lemma65_oracle(a, b);
    CHECK(v > 0.0);
    CHECK(v <= 2.0 + 1e-12);
  }
  CHECK(lemma65_oracle(StandardTensor::identity(), StandardTensor::identity()) == doctest::Approx(1.0));
  CHECK_THROWS_AS(lemma65_oracle(StandardTensor{}, StandardTensor::identity()), DegenerateInput);
}

TEST_CASE("symmetric orthogonal matrices have trace of modulus 1 or 3") {
  CounterRng rng(13);
  for (int n = 0; n < 1000; ++n) {
    const Eigen::Matrix3d s = random_symmetric_orthogonal(rng);
    CHECK((s * s - Eigen::Matrix3d::Identity()).norm() < 1e-12);
    const double t = std::abs(s.trace());
    CHECK(std::min(std::abs(t - 1.0), std::abs(t - 3.0)) < 1e-9);
  }
}
