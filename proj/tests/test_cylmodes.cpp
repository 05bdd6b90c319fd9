#include <numbers>

#include "doctest.h"

#include "ymw/cylmodes.hpp"
#include "ymw/standard.hpp"

using namespace ymw;

namespace {

int count_near(const std::vector<double>& v, double x, double tol = 1e-6) {
  int n = 0;
  for (double e : v)
    if (std::abs(e - x) < tol) ++n;
  return n;
}

TwoFormField constant_form(const TwoFormD& f) {
  return [f](const Point&) { return f; };
}

}  // namespace

TEST_CASE("invariant coframes are eigenforms of *d with eigenvalues -2 and +2") {
  CHECK(frame_eigenvalue(FrameSide::left) == -2.0);
  CHECK(frame_eigenvalue(FrameSide::right) == 2.0);
  CHECK(plus_frame() == FrameSide::right);
  CHECK(minus_frame() == FrameSide::left);
  for (FrameSide s : {FrameSide::left, FrameSide::right})
    for (int a = 0; a < 3; ++a) CHECK(eigen_residual(s, a) < 1e-6);
}

TEST_CASE("coframes are orthonormal in L2") {
  const QuadratureGrid s = sphere_grid(1.0, 8);
  for (FrameSide side : {FrameSide::left, FrameSide::right})
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const double ip = l2_inner(frame_form(side, a), frame_form(side, b), s);
        CHECK(ip == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
      }
}

TEST_CASE("star_d_theta of a frame matches the eigenvalue pointwise") {
  const SphereForm s = frame_form(FrameSide::right, 1, Quat(0, 0, 1, 0));
  const Point p = Point(0.3, -0.5, 0.7, 0.1).normalized();
  const OneFormD lhs = star_d_theta(s, p);
  CHECK(std::sqrt(norm2(lhs - 2.0 * s(p))) < 1e-8);
}

TEST_CASE("Galerkin spectrum on low-degree forms") {
  const std::vector<double> one = galerkin_spectrum(1);
  CHECK(count_near(one, 2.0) == 3);
  CHECK(count_near(one, -2.0) == 3);
  for (double e : one) CHECK((std::abs(e) < 1e-6 || std::abs(std::abs(e) - 2.0) < 1e-6));
  const std::vector<double> two = galerkin_spectrum(2);
  CHECK(count_near(two, 3.0) == 8);
  CHECK(count_near(two, -3.0) == 8);
  CHECK(count_near(two, 2.0) == 3);
}

TEST_CASE("constant self-dual forms slice into the +2 modes, anti-self-dual into -2") {
  CounterRng rng(4);
  Eigen::Matrix3d m;
  for (int i = 0; i < 9; ++i) m(i) = rng.normal();
  const QuadratureGrid s = sphere_grid(1.0, 8);
  const ModeCoefficients p = project_modes(cylinder_slice(constant_form(from_coefficients(m, Duality::self_dual)), 1.0), s);
  CHECK(p.minus2.norm() < 1e-12 * p.plus2.norm());
  CHECK(p.residual_norm < 1e-10 * p.total_norm);
  CHECK(p.pythagoras_gap() < 1e-10);
  const ModeCoefficients q =
      project_modes(cylinder_slice(constant_form(from_coefficients(m, Duality::anti_self_dual)), 1.0), s);
  CHECK(q.plus2.norm() < 1e-12 * q.minus2.norm());
  // The slice coefficient scales as r^2.
  const ModeCoefficients q2 =
      project_modes(cylinder_slice(constant_form(from_coefficients(m, Duality::anti_self_dual)), 0.5), s);
  CHECK(q2.total_norm == doctest::Approx(0.25 * q.total_norm).epsilon(1e-12));
}

TEST_CASE("slices of a linear field leave the +-2 modes") {
  const TwoFormField omega = [](const Point& x) {
    TwoFormD f;
    f[pair_index(0, 1)] = Quat(0, x(2), 0, 0);
    return f;
  };
  const ModeCoefficients c = project_modes(cylinder_slice(omega, 1.0), sphere_grid(1.0, 8));
  CHECK(c.plus2.norm() + c.minus2.norm() < 1e-12);
  CHECK(c.residual_norm > 0.1);
  CHECK(c.pythagoras_gap() < 1e-10);
}

TEST_CASE("mode integration reproduces the exact solution for constant forcing") {
  const ModeSystem sys = ModeSystem::standard();
  const int n = sys.size();
  Eigen::VectorXd b(n), bc(n);
  for (int i = 0; i < n; ++i) {
    b(i) = 0.1 * (i + 1);
    bc(i) = 1.0 - 0.05 * i;
  }
  const double T = 2.0;
  const ModeTrajectory tr = integrate_mode_system(sys, [b](double) { return b; }, T, bc);
  CHECK(tr.probe_error <= 1e-8);
  double worst = 0.0;
  for (std::size_t s = 0; s < tr.t.size(); ++s) {
    const double t = tr.t[s];
    for (int i = 0; i < n; ++i) {
      const ModeChannel& c = sys.channels[i];
      double exact;
      if (c.kind == ChannelKind::closed) {
        exact = bc(i) + b(i) * (t + T);
      } else {
        const double lam = c.eigenvalue;
        const double t0 = lam > 0 ? T : -T;
        exact = (bc(i) + b(i) / lam) * std::exp(lam * (t - t0)) - b(i) / lam;
      }
      worst = std::max(worst, std::abs(tr.alpha(static_cast<Eigen::Index>(s), i) - exact));
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("forward sweep of growing modes is rejected") {
  const ModeSystem sys = ModeSystem::standard();
  ModeOdeOptions opt;
  opt.direction = SweepDirection::forward;
  opt.growth_limit = 1e3;
  const Eigen::VectorXd bc = Eigen::VectorXd::Ones(sys.size());
  CHECK_THROWS_AS(integrate_mode_system(sys, {}, 5.0, bc, opt), StepUnstable);
}

TEST_CASE("closed-channel constraint residual") {
  const ModeSystem sys = ModeSystem::standard();
  const Eigen::VectorXd bc = Eigen::VectorXd::Ones(sys.size());
  const ModeForcing rho = [&](double) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(sys.size());
    for (int i = 0; i < sys.size(); ++i)
      if (sys.channels[i].kind == ChannelKind::closed) r(i) = sys.channels[i].divergence;
    return r;
  };
  const ModeTrajectory tr = integrate_mode_system(sys, {}, 1.0, bc, {}, rho);
  CHECK(tr.constraint_residual < 1e-12);
}

TEST_CASE("comparison estimates hold for random forcings") {
  const ModeSystem sys = ModeSystem::standard();
  for (int k = 0; k < 4; ++k) {
    CounterRng rng(7, 100 + k);
    const ModeForcing beta = random_mode_forcing(sys, rng, k % 2 == 1);
    Eigen::VectorXd bc(sys.size());
    for (int i = 0; i < sys.size(); ++i) bc(i) = rng.normal();
    const ModeTrajectory tr = integrate_mode_system(sys, beta, 3.0, bc);
    const ComparisonReport r = check_comparison(sys, tr, beta, 2, 0.0);
    CHECK(r.pass);
    CHECK(r.violation_a <= 1e-6);
    CHECK(r.violation_b_minus <= 1e-6);
    CHECK(r.violation_b_plus <= 1e-6);
    CHECK(r.violation_b_plus_stated <= 1e-6);
    CHECK(r.max_lhs_a > 0.0);
  }
}

TEST_CASE("the growing-mode kernel e^{-m(s - t0)} fails beyond t0") {
  const ModeSystem sys = ModeSystem::standard();
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(sys.size());
  const ModeForcing beta = [b](double) { return b; };
  const ModeTrajectory tr = integrate_mode_system(sys, beta, 3.0, Eigen::VectorXd::Zero(sys.size()));
  const ComparisonReport r = check_comparison(sys, tr, beta, 2, 0.0);
  CHECK(r.violation_b_plus <= 1e-6);
  CHECK(r.stated_violation_after_t0 > 1.0);
}

TEST_CASE("neck fit recovers synthetic coefficients exactly") {
  CounterRng rng(9);
  const double lambda = 0.1;
  const Eigen::Matrix3d cm = 0.3 * rng.orthogonal3();
  const Eigen::Matrix3d dm = -2.0 * rng.orthogonal3();
  const TwoFormD c = from_coefficients(cm, Duality::anti_self_dual);
  const TwoFormD d = from_coefficients(dm, Duality::self_dual);
  const TwoFormField f = [&](const Point& x) { return c + lambda * lambda * inversion_pullback(d, x); };
  const auto radii = geometric_radii(0.3, 0.5, 6);
  NeckOptions opt;
  opt.nuisance_terms = 0;
  const NeckFit fit = fit_neck(f, Point::Zero(), lambda, 1.0, radii, Duality::anti_self_dual, opt);
  CHECK((fit.c_coef - cm).norm() < 1e-10);
  CHECK((fit.d_coef - dm).norm() < 1e-10);
  CHECK(fit.is_standard_d);
  for (const auto& r : fit.residuals) CHECK(r.norm < 1e-10);
}

TEST_CASE("geometric radii and log-log slope") {
  const auto r = geometric_radii(0.1, 10.0, 5);
  REQUIRE(r.size() == 5);
  CHECK(r.front() == doctest::Approx(0.1));
  CHECK(r[2] == doctest::Approx(1.0));
  CHECK(r.back() == doctest::Approx(10.0));
  std::vector<double> y;
  for (double x : r) y.push_back(3.0 * std::pow(x, -4.5));
  CHECK(log_log_slope(r, y) == doctest::Approx(-4.5));
}
