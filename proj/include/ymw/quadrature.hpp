#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ymw/fields.hpp"

namespace ymw {

enum class Geometry { sphere, ball, annulus };
const char* geometry_name(Geometry g);

// Product rules in Hopf coordinates
//   x = c + R (cos(eta) e^{i xi1}, sin(eta) e^{i xi2}),  s = sin^2(eta),
// with dV_{S^3} = R^3/2 ds dxi1 dxi2.
//
// sphere order N: ceil(N/2) Gauss-Legendre nodes in s, 2N trapezoid nodes in
// each xi; exact for polynomials of degree <= 2N-1.
// ball/annulus order N: sphere factor of order ceil(N/2) times composite
// Gauss-Legendre in r with ceil(N/2)+2 nodes per panel; exact to degree N-1.
// The ball uses dyadic panels down to R/64.
struct QuadratureGrid {
  Geometry geometry = Geometry::sphere;
  double R = 1.0;
  double r0 = 0.0;
  double r1 = 1.0;
  int order = 0;
  Point center = Point::Zero();

  std::vector<Point> nodes;
  std::vector<double> weights;

  // Sphere grids: chart coordinates (s, xi1, xi2) and parameter-space weights.
  std::vector<Eigen::Vector3d> chart;
  std::vector<double> chart_weights;

  std::size_t size() const { return nodes.size(); }
};

// Nodes and weights on [-1, 1].
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n);

QuadratureGrid sphere_grid(double R, int order, const Point& center = Point::Zero());
QuadratureGrid ball_grid(double R, int order, const Point& center = Point::Zero());
QuadratureGrid annulus_grid(double r0, double r1, int order, const Point& center = Point::Zero());
QuadratureGrid grid_from_json(const nlohmann::json& j);
nlohmann::json grid_to_json(const QuadratureGrid& g);

double exact_measure(const QuadratureGrid& g);

// Deterministic pairwise summation.
double pairwise_sum(const double* v, std::size_t n);
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

double integrate(const QuadratureGrid& g, const std::function<double(const Point&)>& f);

template <std::size_t K>
std::array<double, K> integrate_many(const QuadratureGrid& g,
                                     const std::function<std::array<double, K>(const Point&)>& f) {
  std::array<std::vector<double>, K> terms;
  for (auto& t : terms) t.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto v = f(g.nodes[i]);
    for (std::size_t k = 0; k < K; ++k) terms[k][i] = g.weights[i] * v[k];
  }
  std::array<double, K> out{};
  for (std::size_t k = 0; k < K; ++k) out[k] = pairwise_sum(terms[k]);
  return out;
}

// Tangent vectors d/ds, d/dxi1, d/dxi2 at chart node i of a sphere grid.
std::array<Point, 3> chart_tangents(const QuadratureGrid& g, std::size_t i);

// Integral of a 3-form over the sphere with the outward orientation, by
// pulling back along the chart; each node's frame orientation is checked
// against (n, T1, T2, T3).
double integrate_three_form(const QuadratureGrid& sphere, const std::function<ThreeFormD(const Point&)>& omega);
// Same integral through the flux vector: int W . n dS.
double integrate_three_form_flux(const QuadratureGrid& sphere, const std::function<ThreeFormD(const Point&)>& omega);

struct EnergyReport {
  double ym = 0.0;
  double norm_plus2 = 0.0;
  double norm_minus2 = 0.0;
  double chern = 0.0;
  double chern_weil_gap = 0.0;  // |YM - |F+|^2 - 4 pi^2 chern|
  double integer_distance = 0.0;
};

// Tr(F ^ F) as a multiple of dx1234.
double trace_wedge_density(const TwoFormD& f);

EnergyReport energy_report(const GaugeField& conn, const QuadratureGrid& grid);
double ym_energy(const GaugeField& conn, const QuadratureGrid& grid);
double chern_number(const GaugeField& conn, const QuadratureGrid& grid);

struct StokesReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double outer = 0.0;
  double inner = 0.0;
  double volume_codiff = 0.0;  // int 1/2 <D*F, a>
  double volume_dplus = 0.0;   // int <F+, D+ a>
};

// Boundary flux of Tr(F+ ^ a) against the volume terms on r0 <= |x - c| <= r1
// (a ball when r0 = 0).
StokesReport stokes_check(const GaugeField& conn, const GaugeField& a, double r0, double r1, int order,
                          const Point& center = Point::Zero());

}  // namespace ymw
