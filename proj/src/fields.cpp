#include "ymw/fields.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <memory>
#include <ostream>

namespace ymw {

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::adhm: return "adhm";
    case Provenance::polynomial: return "polynomial";
    case Provenance::sum: return "sum";
    case Provenance::gauge_transformed: return "gauge-transformed";
    case Provenance::deformation: return "deformation";
    default: return "custom";
  }
}

GaugeField::GaugeField(Eval eval, JetEval jet, HessianEval hess, Provenance prov)
    : eval_(std::move(eval)), jet_(std::move(jet)), hess_(std::move(hess)), prov_(prov) {}

FieldJet GaugeField::jet(const Point& x) const {
  if (jet_) return jet_(x);
  FieldJet j;
  j.value = eval_(x);
  for (int mu = 0; mu < 4; ++mu) j.d[mu] = central_difference(eval_, x, mu, fd_step_);
  return j;
}

FieldHessian GaugeField::hessian(const Point& x) const {
  if (hess_) return hess_(x);
  FieldHessian h;
  for (int mu = 0; mu < 4; ++mu) {
    for (int rho = 0; rho < 4; ++rho) {
      auto f = [&](const Point& y) { return jet(y).d[rho]; };
      h.dd[mu][rho] = central_difference(f, x, mu, fd_step_);
    }
  }
  return h;
}

GaugeField zero_field() {
  return GaugeField([](const Point&) { return OneFormD{}; }, [](const Point&) { return FieldJet{}; },
                    [](const Point&) { return FieldHessian{}; }, Provenance::polynomial);
}

GaugeField sum(const GaugeField& a, const GaugeField& b, double s) {
  GaugeField::JetEval jet;
  if (a.has_analytic_jet() && b.has_analytic_jet()) {
    jet = [a, b, s](const Point& x) {
      FieldJet ja = a.jet(x);
      const FieldJet jb = b.jet(x);
      ja.value += jb.value * s;
      for (int mu = 0; mu < 4; ++mu) ja.d[mu] += jb.d[mu] * s;
      return ja;
    };
  }
  GaugeField::HessianEval hess;
  if (a.has_analytic_hessian() && b.has_analytic_hessian()) {
    hess = [a, b, s](const Point& x) {
      FieldHessian ha = a.hessian(x);
      const FieldHessian hb = b.hessian(x);
      for (int mu = 0; mu < 4; ++mu)
        for (int rho = 0; rho < 4; ++rho) ha.dd[mu][rho] += hb.dd[mu][rho] * s;
      return ha;
    };
  }
  return GaugeField([a, b, s](const Point& x) { return a(x) + b(x) * s; }, jet, hess, Provenance::sum);
}

TwoFormD curvature(const FieldJet& j) {
  TwoFormD f;
  for (int p = 0; p < 6; ++p) {
    const int mu = kPairs[p][0], nu = kPairs[p][1];
    f[p] = j.d[mu][nu] - j.d[nu][mu] + commutator(j.value[mu], j.value[nu]);
  }
  return f;
}

TwoFormD curvature(const GaugeField& a, const Point& x) { return curvature(a.jet(x)); }

TwoFormField curvature_field(const GaugeField& a) {
  return [a](const Point& x) { return curvature(a, x); };
}

TwoFormD covariant_derivative(const OneFormD& c, const FieldJet& ja) {
  TwoFormD f;
  for (int p = 0; p < 6; ++p) {
    const int mu = kPairs[p][0], nu = kPairs[p][1];
    f[p] = ja.d[mu][nu] - ja.d[nu][mu] + commutator(c[mu], ja.value[nu]) - commutator(c[nu], ja.value[mu]);
  }
  return f;
}

TwoFormD covariant_derivative(const GaugeField& conn, const GaugeField& a, const Point& x) {
  return covariant_derivative(conn(x), a.jet(x));
}

TwoFormD dplus(const GaugeField& conn, const GaugeField& a, const Point& x) {
  return sd_part(covariant_derivative(conn, a, x));
}

TwoFormD dminus(const GaugeField& conn, const GaugeField& a, const Point& x) {
  return asd_part(covariant_derivative(conn, a, x));
}

OneFormD codiff(const GaugeField& conn, const TwoFormField& f, const Point& x, double h) {
  const OneFormD c = conn(x);
  const TwoFormD f0 = f(x);
  std::array<TwoFormD, 4> df;
  for (int mu = 0; mu < 4; ++mu) df[mu] = central_difference(f, x, mu, h);
  OneFormD out;
  for (int nu = 0; nu < 4; ++nu) {
    Quat acc;
    for (int mu = 0; mu < 4; ++mu) {
      if (mu == nu) continue;
      acc += df[mu](mu, nu) + commutator(c[mu], f0(mu, nu));
    }
    out[nu] = -acc;
  }
  return out;
}

OneFormD curvature_codiff(const FieldJet& j, const FieldHessian& h) {
  const TwoFormD f = curvature(j);
  OneFormD out;
  for (int nu = 0; nu < 4; ++nu) {
    Quat acc;
    for (int mu = 0; mu < 4; ++mu) {
      if (mu == nu) continue;
      // d_mu F_{mu nu}
      acc += h.dd[mu][mu][nu] - h.dd[mu][nu][mu] + commutator(j.d[mu][mu], j.value[nu]) +
             commutator(j.value[mu], j.d[mu][nu]);
      acc += commutator(j.value[mu], f(mu, nu));
    }
    out[nu] = -acc;
  }
  return out;
}

OneFormD curvature_codiff(const GaugeField& conn, const Point& x) {
  if (!conn.has_analytic_hessian()) return codiff(conn, curvature_field(conn), x, conn.fd_step());
  return curvature_codiff(conn.jet(x), conn.hessian(x));
}

double bianchi_residual(const GaugeField& conn, const Point& x, double h) {
  const TwoFormField ff = curvature_field(conn);
  const OneFormD c = conn(x);
  const TwoFormD f0 = ff(x);
  std::array<TwoFormD, 4> df;
  for (int mu = 0; mu < 4; ++mu) df[mu] = central_difference(ff, x, mu, h);
  double worst = 0.0;
  for (int omit = 0; omit < 4; ++omit) {
    std::array<int, 3> idx{};
    for (int r = 0, k = 0; r < 4; ++r)
      if (r != omit) idx[k++] = r;
    Quat acc;
    for (int s = 0; s < 3; ++s) {
      const int rho = idx[s], mu = idx[(s + 1) % 3], nu = idx[(s + 2) % 3];
      acc += df[rho](mu, nu) + commutator(c[rho], f0(mu, nu));
    }
    worst = std::max(worst, acc.norm());
  }
  return worst;
}

namespace {

Quat transport_rhs(const GaugeField& conn, const Point& x, const Point& v, const Quat& g) {
  const OneFormD a = conn(x);
  Quat av;
  for (int mu = 0; mu < 4; ++mu) av += a[mu] * v(mu);
  return -(av * g);
}

Quat rk4_step(const GaugeField& conn, const Point& p, const Point& v, double s, double ds, const Quat& g) {
  const Quat k1 = transport_rhs(conn, p + s * v, v, g);
  const Quat k2 = transport_rhs(conn, p + (s + 0.5 * ds) * v, v, g + k1 * (0.5 * ds));
  const Quat k3 = transport_rhs(conn, p + (s + 0.5 * ds) * v, v, g + k2 * (0.5 * ds));
  const Quat k4 = transport_rhs(conn, p + (s + ds) * v, v, g + k3 * ds);
  return g + (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (ds / 6.0);
}

}  // namespace

Quat parallel_transport(const GaugeField& conn, const std::vector<Point>& path, const Quat& g0,
                        const TransportOptions& opt) {
  Quat g = g0;
  for (std::size_t seg = 0; seg + 1 < path.size(); ++seg) {
    const Point p = path[seg];
    const Point v = path[seg + 1] - p;
    if (v.norm() == 0.0) continue;
    if (opt.fixed_steps > 0) {
      const double ds = 1.0 / opt.fixed_steps;
      for (int k = 0; k < opt.fixed_steps; ++k) {
        g = rk4_step(conn, p, v, k * ds, ds, g);
        g = g / g.norm();
      }
      continue;
    }
    double s = 0.0, ds = 0.125;
    int steps = 0;
    while (s < 1.0) {
      if (++steps > opt.max_steps) throw StepUnstable("parallel transport step budget exhausted");
      ds = std::min(ds, 1.0 - s);
      const Quat full = rk4_step(conn, p, v, s, ds, g);
      const Quat half = rk4_step(conn, p, v, s + 0.5 * ds, 0.5 * ds, rk4_step(conn, p, v, s, 0.5 * ds, g));
      const double err = (full - half).norm() / 15.0;
      if (err <= opt.tol || ds < 1e-12) {
        s += ds;
        g = half + (half - full) * (1.0 / 15.0);
        g = g / g.norm();
        if (err < opt.tol / 64.0) ds *= 2.0;
      } else {
        ds *= 0.5;
      }
    }
  }
  return g;
}

GaugeField gauge_transform(const GaugeField& conn, GaugeTransform g, double h) {
  auto eval = [conn, g, h](const Point& x) {
    const Quat gx = g(x);
    const Quat gi = gx.inverse();
    const OneFormD a = conn(x);
    OneFormD out;
    for (int mu = 0; mu < 4; ++mu) {
      const Quat dg = central_difference(g, x, mu, h);
      out[mu] = gx * a[mu] * gi - dg * gi;
    }
    return out;
  };
  return GaugeField(eval, {}, {}, Provenance::gauge_transformed);
}

TwoFormD transformed_curvature(const GaugeField& conn, const GaugeTransform& g, const Point& x) {
  return adjoint_action(g(x), curvature(conn, x));
}

const char* base_gauge_name(BaseGauge b) {
  switch (b) {
    case BaseGauge::identity: return "identity";
    case BaseGauge::direction: return "direction";
    case BaseGauge::conj_direction: return "conj-direction";
    default: return "auto";
  }
}

Quat radial_component(const GaugeField& conn, const Point& center, const Point& x) {
  const Point d = x - center;
  const double r = d.norm();
  if (r == 0.0) throw OriginSingularity("radial direction undefined at the center");
  const OneFormD a = conn(x);
  Quat ar;
  for (int mu = 0; mu < 4; ++mu) ar += a[mu] * (d(mu) / r);
  return ar;
}

namespace {

Quat base_value(BaseGauge b, const Point& dir) {
  const Quat q = Quat::from_vec4(dir / dir.norm());
  switch (b) {
    case BaseGauge::direction: return q;
    case BaseGauge::conj_direction: return q.conj();
    default: return Quat(1);
  }
}

// L^2 norm squared of the tangential part of A^b on the sphere, by a fixed product rule.
double base_tangential_l2(const GaugeField& conn, const Point& center, double radius, BaseGauge b) {
  const GaugeField t = gauge_transform(conn, [center, b](const Point& x) { return base_value(b, x - center); });
  constexpr int n = 8;
  double acc = 0.0;
  // Hopf coordinates with midpoint rules; only used to rank candidates.
  for (int is = 0; is < n; ++is) {
    const double s = (is + 0.5) / n;
    const double ce = std::sqrt(1.0 - s), se = std::sqrt(s);
    for (int i1 = 0; i1 < 2 * n; ++i1) {
      const double x1 = 2.0 * M_PI * (i1 + 0.5) / (2 * n);
      for (int i2 = 0; i2 < 2 * n; ++i2) {
        const double x2 = 2.0 * M_PI * (i2 + 0.5) / (2 * n);
        const Point u(ce * std::cos(x1), ce * std::sin(x1), se * std::cos(x2), se * std::sin(x2));
        const Point x = center + radius * u;
        const OneFormD a = t(x);
        Quat ar;
        for (int mu = 0; mu < 4; ++mu) ar += a[mu] * u(mu);
        double tang = 0.0;
        for (int mu = 0; mu < 4; ++mu) tang += (a[mu] - ar * u(mu)).norm2();
        acc += tang;
      }
    }
  }
  return acc / (n * 4.0 * n * n) * 2.0 * M_PI * M_PI * std::pow(radius, 3);
}

}  // namespace

RadialGauge radial_gauge(const GaugeField& conn, const Point& center, const Annulus& ann, BaseGauge base,
                         int transport_steps) {
  if (!(ann.r_in > 0.0) || !(ann.r_out > ann.r_in)) throw DegenerateInput("annulus must satisfy 0 < r_in < r_out");
  RadialGauge out;
  out.base_radius = std::sqrt(ann.r_in * ann.r_out);
  if (base == BaseGauge::automatic) {
    double best = std::numeric_limits<double>::infinity();
    for (BaseGauge b : {BaseGauge::identity, BaseGauge::direction, BaseGauge::conj_direction}) {
      const double v = base_tangential_l2(conn, center, out.base_radius, b);
      if (v < best) {
        best = v;
        base = b;
      }
    }
  }
  out.base = base;
  out.base_tangential_l2 = base_tangential_l2(conn, center, out.base_radius, base);
  const double rb = out.base_radius;
  TransportOptions opt;
  opt.fixed_steps = transport_steps;
  out.transform = [conn, center, base, rb, opt](const Point& x) {
    const Point d = x - center;
    const double r = d.norm();
    if (r == 0.0) throw OriginSingularity("radial gauge undefined at the center");
    const Point start = center + d * (rb / r);
    const Quat t = parallel_transport(conn, {start, x}, Quat(1), opt);
    return base_value(base, d) * t.conj();
  };
  out.field = gauge_transform(conn, out.transform);
  return out;
}

namespace {

struct MonomialTable {
  std::array<std::array<int, 4>, PolynomialField::kMonomials> exps{};
  int index[4][4][4][4];

  MonomialTable() {
    for (auto& a : index)
      for (auto& b : a)
        for (auto& c : b)
          for (auto& d : c) d = -1;
    int k = 0;
    for (int deg = 0; deg <= 3; ++deg)
      for (int a = deg; a >= 0; --a)
        for (int b = deg - a; b >= 0; --b)
          for (int c = deg - a - b; c >= 0; --c) {
            const int d = deg - a - b - c;
            exps[k] = {a, b, c, d};
            index[a][b][c][d] = k++;
          }
  }
};

const MonomialTable& monomials() {
  static const MonomialTable t;
  return t;
}

OneFormD column_to_form(const Eigen::Matrix<double, 12, 1>& v) {
  OneFormD a;
  for (int mu = 0; mu < 4; ++mu) a[mu] = {0.0, v(3 * mu), v(3 * mu + 1), v(3 * mu + 2)};
  return a;
}

}  // namespace

PolynomialField::PolynomialField() : coef_(Eigen::Matrix<double, kMonomials, 12>::Zero()) { rebuild(); }

// Derivatives of monomials are scaled lower monomials, so derivative
// coefficient tables are precomputed once per field.
void PolynomialField::rebuild() {
  const auto& t = monomials();
  for (auto& g : grad_) g.setZero();
  for (auto& h : hess_) h.setZero();
  for (int k = 0; k < kMonomials; ++k) {
    const auto& e = t.exps[k];
    for (int mu = 0; mu < 4; ++mu) {
      if (e[mu] == 0) continue;
      std::array<int, 4> f = e;
      f[mu] -= 1;
      grad_[mu].row(t.index[f[0]][f[1]][f[2]][f[3]]) += e[mu] * coef_.row(k);
      for (int rho = 0; rho < 4; ++rho) {
        if (f[rho] == 0) continue;
        std::array<int, 4> g = f;
        g[rho] -= 1;
        hess_[mu * 4 + rho].row(t.index[g[0]][g[1]][g[2]][g[3]]) += double(e[mu] * f[rho]) * coef_.row(k);
      }
    }
  }
}

PolynomialField& PolynomialField::add_term(int mu, const Quat& q, const std::array<int, 4>& e, double coeff) {
  if (mu < 0 || mu > 3) throw DegenerateInput("form index out of range");
  for (int v : e)
    if (v < 0) throw DegenerateInput("negative exponent");
  if (e[0] + e[1] + e[2] + e[3] > 3) throw DegenerateInput("polynomial degree above 3");
  const int k = monomials().index[e[0]][e[1]][e[2]][e[3]];
  for (int b = 0; b < 3; ++b) coef_(k, 3 * mu + b) += coeff * q[b + 1];
  rebuild();
  return *this;
}

PolynomialField PolynomialField::random(CounterRng& rng, int degree, double scale) {
  PolynomialField p;
  const auto& t = monomials();
  for (int k = 0; k < kMonomials; ++k) {
    const auto& e = t.exps[k];
    if (e[0] + e[1] + e[2] + e[3] > degree) continue;
    for (int c = 0; c < 12; ++c) p.coef_(k, c) = scale * rng.uniform(-1.0, 1.0);
  }
  p.rebuild();
  return p;
}

namespace {

Eigen::Matrix<double, PolynomialField::kMonomials, 1> monomial_values(const Point& x) {
  Eigen::Matrix<double, PolynomialField::kMonomials, 1> v;
  v(0) = 1.0;
  v.segment<4>(1) = x;
  const auto& t = monomials();
  for (int k = 5; k < PolynomialField::kMonomials; ++k) {
    const auto& e = t.exps[k];
    int i = 0;
    while (e[i] == 0) ++i;
    std::array<int, 4> f = e;
    f[i] -= 1;
    v(k) = x(i) * v(t.index[f[0]][f[1]][f[2]][f[3]]);
  }
  return v;
}

}  // namespace

OneFormD PolynomialField::value(const Point& x) const {
  return column_to_form(coef_.transpose() * monomial_values(x));
}

FieldJet PolynomialField::jet(const Point& x) const {
  const auto v = monomial_values(x);
  FieldJet j;
  j.value = column_to_form(coef_.transpose() * v);
  for (int mu = 0; mu < 4; ++mu) j.d[mu] = column_to_form(grad_[mu].transpose() * v.head<15>());
  return j;
}

FieldHessian PolynomialField::hessian(const Point& x) const {
  const Eigen::Matrix<double, 5, 1> v(1.0, x(0), x(1), x(2), x(3));
  FieldHessian h;
  for (int mu = 0; mu < 4; ++mu)
    for (int rho = 0; rho < 4; ++rho) h.dd[mu][rho] = column_to_form(hess_[mu * 4 + rho].transpose() * v);
  return h;
}

GaugeField PolynomialField::field() const {
  const auto self = std::make_shared<const PolynomialField>(*this);
  return GaugeField([self](const Point& x) { return self->value(x); },
                    [self](const Point& x) { return self->jet(x); },
                    [self](const Point& x) { return self->hessian(x); }, Provenance::polynomial);
}

void write_field_csv(std::ostream& os, const GaugeField& conn, const std::vector<Point>& points) {
  static const char* names[6] = {"12", "13", "14", "23", "24", "34"};
  static const char* legs[3] = {"i", "j", "k"};
  os << "x1,x2,x3,x4";
  for (const char* n : names)
    for (const char* l : legs) os << ",F" << n << "_" << l;
  os << ",F2,Fplus2,Fminus2\n";
  const auto old = os.precision(17);
  for (const Point& x : points) {
    const TwoFormD f = curvature(conn, x);
    os << x(0) << ',' << x(1) << ',' << x(2) << ',' << x(3);
    for (int p = 0; p < 6; ++p) os << ',' << f[p].x << ',' << f[p].y << ',' << f[p].z;
    os << ',' << norm2(f) << ',' << norm2(sd_part(f)) << ',' << norm2(asd_part(f)) << '\n';
  }
  os.precision(old);
}

}  // namespace ymw
