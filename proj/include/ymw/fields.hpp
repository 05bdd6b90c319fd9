#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ymw/forms.hpp"
#include "ymw/rng.hpp"

namespace ymw {

// d[mu] is the partial derivative along x^mu of the whole 1-form.
struct FieldJet {
  OneFormD value;
  std::array<OneFormD, 4> d{};
};

// dd[mu][rho] = d_mu d_rho of the 1-form.
struct FieldHessian {
  std::array<std::array<OneFormD, 4>, 4> dd{};
};

enum class Provenance { adhm, polynomial, sum, gauge_transformed, deformation, custom };

const char* provenance_name(Provenance p);

// An su(2)-valued 1-form on R^4: a connection in a fixed trivialization or a
// tangent vector to the space of connections. Derivative evaluators are optional;
// without them central differences with one Richardson step are used.
class GaugeField {
 public:
  using Eval = std::function<OneFormD(const Point&)>;
  using JetEval = std::function<FieldJet(const Point&)>;
  using HessianEval = std::function<FieldHessian(const Point&)>;

  GaugeField() = default;
  explicit GaugeField(Eval eval, JetEval jet = {}, HessianEval hess = {}, Provenance prov = Provenance::custom);

  OneFormD operator()(const Point& x) const { return eval_(x); }
  FieldJet jet(const Point& x) const;
  FieldHessian hessian(const Point& x) const;

  bool has_analytic_jet() const { return static_cast<bool>(jet_); }
  bool has_analytic_hessian() const { return static_cast<bool>(hess_); }
  Provenance provenance() const { return prov_; }

  void set_fd_step(double h) { fd_step_ = h; }
  double fd_step() const { return fd_step_; }

 private:
  Eval eval_;
  JetEval jet_;
  HessianEval hess_;
  Provenance prov_ = Provenance::custom;
  double fd_step_ = 1e-4;
};

using TwoFormField = std::function<TwoFormD(const Point&)>;

GaugeField zero_field();
// a + s b.
GaugeField sum(const GaugeField& a, const GaugeField& b, double s = 1.0);

// Richardson-extrapolated central difference of f along x^mu.
template <typename F>
auto central_difference(const F& f, const Point& x, int mu, double h) {
  Point e = Point::Zero();
  e(mu) = 1.0;
  const auto d1 = (f(x + h * e) - f(x - h * e)) * (1.0 / (2.0 * h));
  const auto d2 = (f(x + 0.5 * h * e) - f(x - 0.5 * h * e)) * (1.0 / h);
  return (d2 * 4.0 - d1) * (1.0 / 3.0);
}

TwoFormD curvature(const FieldJet& jet);
TwoFormD curvature(const GaugeField& a, const Point& x);
TwoFormField curvature_field(const GaugeField& a);

// D_A a.
TwoFormD covariant_derivative(const OneFormD& conn_value, const FieldJet& a);
TwoFormD covariant_derivative(const GaugeField& conn, const GaugeField& a, const Point& x);
TwoFormD dplus(const GaugeField& conn, const GaugeField& a, const Point& x);
TwoFormD dminus(const GaugeField& conn, const GaugeField& a, const Point& x);

// (D_A^* F)_nu = -sum_mu (d_mu F_{mu nu} + [A_mu, F_{mu nu}]), F differenced numerically.
OneFormD codiff(const GaugeField& conn, const TwoFormField& f, const Point& x, double h = 1e-4);
// D_A^* F_A, analytic when the field has a Hessian evaluator.
OneFormD curvature_codiff(const FieldJet& jet, const FieldHessian& hess);
OneFormD curvature_codiff(const GaugeField& conn, const Point& x);
// Largest component of the cyclic sum D_[rho F_{mu nu]}.
double bianchi_residual(const GaugeField& conn, const Point& x, double h = 1e-4);

// Solutions of g' = -A(gamma') g along a polyline, renormalized to the unit sphere.
struct TransportOptions {
  double tol = 1e-12;
  int fixed_steps = 0;  // > 0 disables adaptivity, giving a smooth map of the endpoints
  int max_steps = 1 << 20;
};
Quat parallel_transport(const GaugeField& conn, const std::vector<Point>& path, const Quat& g0 = Quat(1),
                        const TransportOptions& opt = {});

// g : R^4 -> SU(2) as unit quaternions.
using GaugeTransform = std::function<Quat(const Point&)>;

// A^g = g A g^{-1} - dg g^{-1}, dg by central differences.
GaugeField gauge_transform(const GaugeField& conn, GaugeTransform g, double h = 1e-5);
// F_{A^g} = g F_A g^{-1}.
TwoFormD transformed_curvature(const GaugeField& conn, const GaugeTransform& g, const Point& x);

enum class BaseGauge { identity, direction, conj_direction, automatic };
const char* base_gauge_name(BaseGauge b);

struct Annulus {
  double r_in = 0.0;
  double r_out = 1.0;
};

struct RadialGauge {
  GaugeField field;
  GaugeTransform transform;
  BaseGauge base = BaseGauge::identity;
  double base_radius = 0.0;
  double base_tangential_l2 = 0.0;
};

// Gauge with vanishing radial component about `center` on the annulus. The
// base-sphere gauge is a degree-0 or degree-1 map of the direction x-hat.
RadialGauge radial_gauge(const GaugeField& conn, const Point& center, const Annulus& ann,
                         BaseGauge base = BaseGauge::automatic, int transport_steps = 48);

// A(d/dr) at x for a field centered at `center`.
Quat radial_component(const GaugeField& conn, const Point& center, const Point& x);

// Polynomial su(2)-valued 1-forms of degree <= 3 with analytic derivatives.
class PolynomialField {
 public:
  static constexpr int kMonomials = 35;

  PolynomialField();

  // Adds coeff * x^e dx^mu (x) q.
  PolynomialField& add_term(int mu, const Quat& q, const std::array<int, 4>& e, double coeff = 1.0);
  static PolynomialField random(CounterRng& rng, int degree = 3, double scale = 1.0);

  OneFormD value(const Point& x) const;
  FieldJet jet(const Point& x) const;
  FieldHessian hessian(const Point& x) const;
  GaugeField field() const;

  const Eigen::Matrix<double, kMonomials, 12>& coefficients() const { return coef_; }

 private:
  void rebuild();

  // Monomials are ordered by degree: 1 of degree 0, 4 of degree 1, 10 of degree 2.
  Eigen::Matrix<double, kMonomials, 12> coef_;
  std::array<Eigen::Matrix<double, 15, 12>, 4> grad_;
  std::array<Eigen::Matrix<double, 5, 12>, 16> hess_;
};

// Dense table of samples as CSV: x1..x4, 18 curvature components, |F|^2, |F+|^2, |F-|^2.
void write_field_csv(std::ostream& os, const GaugeField& conn, const std::vector<Point>& points);

}  // namespace ymw
