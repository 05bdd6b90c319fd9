#include <numbers>

#include "doctest.h"

#include "ymw/adhm.hpp"
#include "ymw/quadrature.hpp"
#include "ymw/rng.hpp"

using namespace ymw;

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("Gauss-Legendre rule with five nodes") {
  const auto [x, w] = gauss_legendre(5);
  const double nodes[] = {-0.906179845938664, -0.5384693101056831, 0.0, 0.5384693101056831, 0.906179845938664};
  const double weights[] = {0.23692688505618942, 0.4786286704993662, 0.568888888888889, 0.4786286704993662,
                            0.23692688505618942};
  std::vector<std::pair<double, double>> got;
  for (int i = 0; i < 5; ++i) got.emplace_back(x(i), w(i));
  std::sort(got.begin(), got.end());
  for (int i = 0; i < 5; ++i) {
    CHECK(got[i].first == doctest::Approx(nodes[i]).epsilon(1e-15));
    CHECK(got[i].second == doctest::Approx(weights[i]).epsilon(1e-14));
  }
  CHECK_THROWS_AS(gauss_legendre(0), DegenerateInput);
}

TEST_CASE("measures of sphere, ball and annulus") {
  for (double R : {0.5, 1.0, 3.0}) {
    CHECK(integrate(sphere_grid(R, 4), [](const Point&) { return 1.0; }) ==
          doctest::Approx(2 * kPi * kPi * R * R * R).epsilon(1e-13));
    CHECK(integrate(ball_grid(R, 4), [](const Point&) { return 1.0; }) ==
          doctest::Approx(0.5 * kPi * kPi * std::pow(R, 4)).epsilon(1e-13));
  }
  const QuadratureGrid a = annulus_grid(0.5, 1.0, 6);
  CHECK(integrate(a, [](const Point&) { return 1.0; }) == doctest::Approx(exact_measure(a)).epsilon(1e-13));
  CHECK(exact_measure(a) == doctest::Approx(0.5 * kPi * kPi * (1.0 - 0.0625)));
}

TEST_CASE("sphere moments are exact up to the stated degree") {
  // Mean of x1^2 on the unit 3-sphere is 1/4, of x1^2 x2^2 is 1/24, of x1^4 is 1/8.
  const double area = 2 * kPi * kPi;
  const QuadratureGrid s = sphere_grid(1.0, 8);
  CHECK(integrate(s, [](const Point& x) { return x(0) * x(0); }) == doctest::Approx(area / 4).epsilon(1e-13));
  CHECK(integrate(s, [](const Point& x) { return x(0) * x(0) * x(1) * x(1); }) ==
        doctest::Approx(area / 24).epsilon(1e-13));
  CHECK(integrate(s, [](const Point& x) { return std::pow(x(2), 4); }) == doctest::Approx(area / 8).epsilon(1e-13));
  CHECK(std::abs(integrate(s, [](const Point& x) { return x(0) * x(1) * x(2); })) < 1e-14);
  const Point c(1.0, -2.0, 0.5, 0.0);
  const QuadratureGrid sc = sphere_grid(2.0, 8, c);
  CHECK(integrate(sc, [&](const Point& x) { return (x - c)(3) * (x - c)(3); }) ==
        doctest::Approx(2 * kPi * kPi * 8.0 * 4.0 / 4).epsilon(1e-13));
}

TEST_CASE("ball integral of the unit instanton density matches the radial reference") {
  const GaugeField conn = inverted_connection(unit_adhm(1.0));
  // 1/2 int_{|x|<R} 48 / (1 + |x|^2)^4, evaluated to 30 digits.
  const std::pair<double, double> ref[] = {{1.0, 19.739208802178717238}, {3.0, 38.37302191143542631}};
  for (const auto& [R, e] : ref) {
    const EnergyReport r = energy_report(conn, ball_grid(R, 24));
    CHECK(r.ym == doctest::Approx(e).epsilon(1e-9));
    CHECK(r.norm_plus2 < 1e-16 * r.norm_minus2);
  }
}

TEST_CASE("energy and Chern number over a large ball") {
  const GaugeField conn = inverted_connection(unit_adhm(1.0));
  const EnergyReport r = energy_report(conn, ball_grid(40.0, 32));
  CHECK(r.ym == doctest::Approx(39.478371417602820102).epsilon(1e-12));
  CHECK(r.chern == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(r.integer_distance < 1e-5);
  CHECK(r.chern_weil_gap < 1e-10 * r.ym);
}

TEST_CASE("trace of F ^ F is |F-|^2 - |F+|^2 pointwise") {
  CounterRng rng(31);
  const GaugeField a = PolynomialField::random(rng, 2).field();
  for (int n = 0; n < 20; ++n) {
    const TwoFormD f = curvature(a, rng.in_ball(1.0));
    CHECK(trace_wedge_density(f) ==
          doctest::Approx(norm2(asd_part(f)) - norm2(sd_part(f))).epsilon(1e-12).scale(norm2(f)));
  }
}

TEST_CASE("Stokes identity on annuli and balls for random cubic fields") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    CounterRng rng(seed);
    CounterRng ra = rng.split(0), rb = rng.split(1);
    const GaugeField A = PolynomialField::random(ra, 3).field();
    const GaugeField a = PolynomialField::random(rb, 3).field();
    const StokesReport s = stokes_check(A, a, 0.5, 1.0, 48);
    CHECK(s.residual <= 1e-10);
    CHECK(std::abs(s.lhs) > 1e-3);
    const StokesReport b = stokes_check(A, a, 0.0, 0.8, 24);
    CHECK(b.residual <= 1e-10);
  }
}

TEST_CASE("Stokes identity for the self-dual instanton field") {
  const GaugeField conn = connection(unit_adhm(1.0));
  CounterRng rng(5);
  const GaugeField a = PolynomialField::random(rng, 1).field();
  const StokesReport s = stokes_check(conn, a, 0.5, 1.0, 24);
  CHECK(std::abs(s.lhs) > 1e-2);
  CHECK(s.residual <= 1e-4);
  CHECK(std::abs(s.volume_codiff) < 1e-6 * std::abs(s.volume_dplus));
}

TEST_CASE("grid descriptions round trip and reject unknown keys") {
  const QuadratureGrid g = annulus_grid(0.25, 2.0, 10);
  const QuadratureGrid h = grid_from_json(grid_to_json(g));
  CHECK(h.size() == g.size());
  CHECK(h.geometry == Geometry::annulus);
  CHECK_THROWS_AS(grid_from_json({{"geometry", "ball"}, {"radius", 2}}), ConfigError);
  CHECK_THROWS_AS(grid_from_json({{"geometry", "torus"}}), ConfigError);
  CHECK_THROWS_AS(annulus_grid(1.0, 0.5, 8), DegenerateInput);
}

TEST_CASE("integrate_many sums every component deterministically") {
  const QuadratureGrid g = ball_grid(1.0, 12);
  const auto v = integrate_many<2>(g, [](const Point& x) { return std::array<double, 2>{1.0, x.squaredNorm()}; });
  CHECK(v[0] == doctest::Approx(0.5 * kPi * kPi));
  // int |x|^2 over the unit ball = 2 pi^2 / 6.
  CHECK(v[1] == doctest::Approx(kPi * kPi / 3).epsilon(1e-13));
  const auto w = integrate_many<2>(g, [](const Point& x) { return std::array<double, 2>{1.0, x.squaredNorm()}; });
  CHECK(v == w);
}

TEST_CASE("flat fields carry no energy or charge") {
  const EnergyReport r = energy_report(zero_field(), ball_grid(2.0, 8));
  CHECK(r.ym == 0.0);
  CHECK(r.chern == 0.0);
  CounterRng rng(1);
  const GaugeField a = PolynomialField::random(rng, 3).field();
  const StokesReport s = stokes_check(zero_field(), a, 0.5, 1.0, 16);
  CHECK(s.lhs == 0.0);
  CHECK(s.rhs == 0.0);
  CHECK(s.residual == 0.0);
  const StokesReport t = stokes_check(a, zero_field(), 0.5, 1.0, 16);
  CHECK(t.residual == 0.0);
}

TEST_CASE("self-dual field has the opposite charge") {
  const EnergyReport r = energy_report(connection(unit_adhm(1.0)), ball_grid(40.0, 32));
  CHECK(r.chern == doctest::Approx(-1.0).epsilon(1e-4));
  CHECK(r.norm_minus2 < 1e-12 * r.norm_plus2);
  CHECK(r.ym == doctest::Approx(4 * kPi * kPi).epsilon(1e-4));
}

TEST_CASE("energy is invariant under rescaling the instanton") {
  const QuadratureGrid g = ball_grid(40.0, 32);
  const double e1 = ym_energy(inverted_connection(unit_adhm(1.0)), g);
  const double e2 = ym_energy(inverted_connection(unit_adhm(2.0)), g);
  CHECK(e2 == doctest::Approx(e1).epsilon(1e-3));
}
