#include "ymw/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace ymw {

namespace {
constexpr double kPi = std::numbers::pi;
}

const char* geometry_name(Geometry g) {
  switch (g) {
    case Geometry::sphere: return "sphere";
    case Geometry::ball: return "ball";
    default: return "annulus";
  }
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n) {
  if (n < 1) throw DegenerateInput("Gauss-Legendre needs at least one node");
  Eigen::VectorXd x(n), w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    x(i) = -z;
    x(n - 1 - i) = z;
    w(i) = w(n - 1 - i) = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  if (n % 2 == 1) x(n / 2) = 0.0;
  return {x, w};
}

namespace {

struct SphereFactor {
  std::vector<Eigen::Vector3d> chart;
  std::vector<double> chart_weights;
  std::vector<Point> unit;  // points on the unit sphere
};

SphereFactor sphere_factor(int order) {
  if (order < 1) throw DegenerateInput("quadrature order must be positive");
  const int ns = (order + 1) / 2;
  const int nx = 2 * order;
  const auto [gx, gw] = gauss_legendre(ns);
  SphereFactor f;
  f.chart.reserve(static_cast<std::size_t>(ns) * nx * nx);
  const double h = 2.0 * kPi / nx;
  for (int a = 0; a < ns; ++a) {
    const double s = 0.5 * (gx(a) + 1.0);
    const double ws = 0.5 * gw(a);
    const double ce = std::sqrt(1.0 - s), se = std::sqrt(s);
    for (int b = 0; b < nx; ++b) {
      const double x1 = b * h;
      for (int c = 0; c < nx; ++c) {
        const double x2 = c * h;
        f.chart.emplace_back(s, x1, x2);
        f.chart_weights.push_back(ws * h * h);
        f.unit.emplace_back(ce * std::cos(x1), ce * std::sin(x1), se * std::cos(x2), se * std::sin(x2));
      }
    }
  }
  return f;
}

void add_shell(QuadratureGrid& g, const SphereFactor& sf, double ra, double rb, int nr) {
  const auto [gx, gw] = gauss_legendre(nr);
  for (int k = 0; k < nr; ++k) {
    const double r = 0.5 * (rb - ra) * gx(k) + 0.5 * (rb + ra);
    const double wr = 0.5 * (rb - ra) * gw(k) * r * r * r * 0.5;
    for (std::size_t i = 0; i < sf.unit.size(); ++i) {
      g.nodes.push_back(g.center + r * sf.unit[i]);
      g.weights.push_back(wr * sf.chart_weights[i]);
    }
  }
}

}  // namespace

QuadratureGrid sphere_grid(double R, int order, const Point& center) {
  if (!(R > 0.0)) throw DegenerateInput("sphere radius must be positive");
  QuadratureGrid g;
  g.geometry = Geometry::sphere;
  g.R = R;
  g.r0 = g.r1 = R;
  g.order = order;
  g.center = center;
  SphereFactor sf = sphere_factor(order);
  const double jac = 0.5 * R * R * R;
  g.nodes.reserve(sf.unit.size());
  for (std::size_t i = 0; i < sf.unit.size(); ++i) {
    g.nodes.push_back(center + R * sf.unit[i]);
    g.weights.push_back(jac * sf.chart_weights[i]);
  }
  g.chart = std::move(sf.chart);
  g.chart_weights = std::move(sf.chart_weights);
  return g;
}

QuadratureGrid ball_grid(double R, int order, const Point& center) {
  if (!(R > 0.0)) throw DegenerateInput("ball radius must be positive");
  QuadratureGrid g;
  g.geometry = Geometry::ball;
  g.R = g.r1 = R;
  g.r0 = 0.0;
  g.order = order;
  g.center = center;
  const int half = (order + 1) / 2;
  const SphereFactor sf = sphere_factor(half);
  constexpr int kPanels = 7;
  double lo = 0.0;
  for (int p = kPanels - 1; p >= 0; --p) {
    const double hi = R / std::pow(2.0, p);
    add_shell(g, sf, lo, hi, half + 2);
    lo = hi;
  }
  return g;
}

QuadratureGrid annulus_grid(double r0, double r1, int order, const Point& center) {
  if (!(r0 > 0.0) || !(r1 > r0)) throw DegenerateInput("annulus must satisfy 0 < r0 < r1");
  QuadratureGrid g;
  g.geometry = Geometry::annulus;
  g.r0 = r0;
  g.R = g.r1 = r1;
  g.order = order;
  g.center = center;
  const int half = (order + 1) / 2;
  add_shell(g, sphere_factor(half), r0, r1, half + 2);
  return g;
}

QuadratureGrid grid_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("grid must be an object");
  for (const auto& [key, _] : j.items())
    if (key != "geometry" && key != "R" && key != "r0" && key != "r1" && key != "order" && key != "nodes")
      throw ConfigError("unknown grid key: " + key);
  const std::string geo = j.value("geometry", std::string("ball"));
  const int order = j.value("order", 32);
  QuadratureGrid g;
  if (geo == "sphere")
    g = sphere_grid(j.value("R", 1.0), order);
  else if (geo == "ball")
    g = ball_grid(j.value("R", 1.0), order);
  else if (geo == "annulus")
    g = annulus_grid(j.value("r0", 0.5), j.value("r1", 1.0), order);
  else
    throw ConfigError("unknown geometry: " + geo);
  if (j.contains("nodes") && j["nodes"].get<std::size_t>() != g.size())
    throw ConfigError("grid node count does not match its order");
  return g;
}

nlohmann::json grid_to_json(const QuadratureGrid& g) {
  nlohmann::json j;
  j["geometry"] = geometry_name(g.geometry);
  if (g.geometry == Geometry::annulus) {
    j["r0"] = g.r0;
    j["r1"] = g.r1;
  } else {
    j["R"] = g.R;
  }
  j["order"] = g.order;
  j["nodes"] = g.size();
  return j;
}

double exact_measure(const QuadratureGrid& g) {
  switch (g.geometry) {
    case Geometry::sphere: return 2.0 * kPi * kPi * std::pow(g.R, 3);
    case Geometry::ball: return 0.5 * kPi * kPi * std::pow(g.R, 4);
    default: return 0.5 * kPi * kPi * (std::pow(g.r1, 4) - std::pow(g.r0, 4));
  }
}

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t m = n / 2;
  return pairwise_sum(v, m) + pairwise_sum(v + m, n - m);
}

double integrate(const QuadratureGrid& g, const std::function<double(const Point&)>& f) {
  std::vector<double> t(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) t[i] = g.weights[i] * f(g.nodes[i]);
  return pairwise_sum(t);
}

std::array<Point, 3> chart_tangents(const QuadratureGrid& g, std::size_t i) {
  if (g.geometry != Geometry::sphere) throw DegenerateInput("chart tangents need a sphere grid");
  const double s = g.chart[i](0), x1 = g.chart[i](1), x2 = g.chart[i](2);
  const double ce = std::sqrt(1.0 - s), se = std::sqrt(s);
  const double R = g.R;
  Point ts(-std::cos(x1) / (2.0 * ce), -std::sin(x1) / (2.0 * ce), std::cos(x2) / (2.0 * se),
           std::sin(x2) / (2.0 * se));
  Point t1(-ce * std::sin(x1), ce * std::cos(x1), 0.0, 0.0);
  Point t2(0.0, 0.0, -se * std::sin(x2), se * std::cos(x2));
  return {R * ts, R * t1, R * t2};
}

double integrate_three_form(const QuadratureGrid& g, const std::function<ThreeFormD(const Point&)>& omega) {
  if (g.geometry != Geometry::sphere) throw DegenerateInput("3-form integration needs a sphere grid");
  std::vector<double> t(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto tan = chart_tangents(g, i);
    const Point n = (g.nodes[i] - g.center) / g.R;
    Eigen::Matrix4d frame;
    frame << n, tan[0], tan[1], tan[2];
    const double orient = frame.determinant() > 0.0 ? 1.0 : -1.0;
    t[i] = orient * g.chart_weights[i] * omega(g.nodes[i]).evaluate(tan[0], tan[1], tan[2]);
  }
  return pairwise_sum(t);
}

double integrate_three_form_flux(const QuadratureGrid& g, const std::function<ThreeFormD(const Point&)>& omega) {
  if (g.geometry != Geometry::sphere) throw DegenerateInput("3-form integration needs a sphere grid");
  std::vector<double> t(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point n = (g.nodes[i] - g.center) / g.R;
    t[i] = g.weights[i] * omega(g.nodes[i]).flux_vector().dot(n);
  }
  return pairwise_sum(t);
}

double trace_wedge_density(const TwoFormD& f) {
  const Quat w = f[0] * f[5] - f[1] * f[4] + f[2] * f[3];
  return 4.0 * w.w;
}

EnergyReport energy_report(const GaugeField& conn, const QuadratureGrid& grid) {
  const auto v = integrate_many<3>(grid, [&conn](const Point& x) {
    const TwoFormD f = curvature(conn, x);
    return std::array<double, 3>{norm2(sd_part(f)), norm2(asd_part(f)), trace_wedge_density(f)};
  });
  EnergyReport r;
  r.norm_plus2 = v[0];
  r.norm_minus2 = v[1];
  r.ym = 0.5 * (v[0] + v[1]);
  r.chern = v[2] / (8.0 * kPi * kPi);
  r.chern_weil_gap = std::abs(r.ym - r.norm_plus2 - 4.0 * kPi * kPi * r.chern);
  r.integer_distance = std::abs(r.chern - std::round(r.chern));
  return r;
}

double ym_energy(const GaugeField& conn, const QuadratureGrid& grid) { return energy_report(conn, grid).ym; }

double chern_number(const GaugeField& conn, const QuadratureGrid& grid) {
  return energy_report(conn, grid).chern;
}

StokesReport stokes_check(const GaugeField& conn, const GaugeField& a, double r0, double r1, int order,
                          const Point& center) {
  const bool ball = r0 == 0.0;
  const QuadratureGrid vol = ball ? ball_grid(r1, order, center) : annulus_grid(r0, r1, order, center);
  const int sphere_order = (order + 1) / 2;
  auto boundary = [&](const Point& x) { return wedge_trace(sd_part(curvature(conn, x)), a(x)); };

  StokesReport r;
  r.outer = integrate_three_form(sphere_grid(r1, sphere_order, center), boundary);
  r.inner = ball ? 0.0 : integrate_three_form(sphere_grid(r0, sphere_order, center), boundary);
  r.lhs = r.outer - r.inner;

  const bool analytic = conn.has_analytic_hessian();
  const auto v = integrate_many<2>(vol, [&](const Point& x) {
    const FieldJet ja = conn.jet(x);
    const OneFormD dstar = analytic ? curvature_codiff(ja, conn.hessian(x)) : curvature_codiff(conn, x);
    const TwoFormD fp = sd_part(curvature(ja));
    const FieldJet jb = a.jet(x);
    return std::array<double, 2>{0.5 * inner(dstar, jb.value), inner(fp, sd_part(covariant_derivative(ja.value, jb)))};
  });
  r.volume_codiff = v[0];
  r.volume_dplus = v[1];
  r.rhs = v[0] - v[1];
  r.residual = std::abs(r.lhs - r.rhs) / (std::abs(r.lhs) + std::abs(r.rhs) + 1e-14);
  return r;
}

}  // namespace ymw
