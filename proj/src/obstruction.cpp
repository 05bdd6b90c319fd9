#include "ymw/obstruction.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "ymw/errors.hpp"
#include "ymw/quadrature.hpp"
#include "ymw/rng.hpp"

namespace ymw {

namespace {

FieldJet combine(const FieldJet& a, double sa, const FieldJet& b, double sb) {
  FieldJet out;
  out.value = a.value * sa + b.value * sb;
  for (int mu = 0; mu < 4; ++mu) out.d[mu] = a.d[mu] * sa + b.d[mu] * sb;
  return out;
}

// Central difference in t with one Richardson step.
template <typename F>
FieldJet t_derivative(const F& f, double h) {
  const FieldJet d1 = combine(f(h), 1.0 / (2.0 * h), f(-h), -1.0 / (2.0 * h));
  const FieldJet d2 = combine(f(0.5 * h), 1.0 / h, f(-0.5 * h), -1.0 / h);
  return combine(d2, 4.0 / 3.0, d1, -1.0 / 3.0);
}

Eigen::Matrix4d expm(const Eigen::Matrix4d& g) {
  int squarings = 0;
  double n = g.norm();
  while (n > 0.5) {
    n *= 0.5;
    ++squarings;
  }
  const Eigen::Matrix4d s = g / std::ldexp(1.0, squarings);
  Eigen::Matrix4d term = Eigen::Matrix4d::Identity(), out = Eigen::Matrix4d::Identity();
  for (int k = 1; k <= 20; ++k) {
    term = term * s / k;
    out += term;
  }
  for (int i = 0; i < squarings; ++i) out = out * out;
  return out;
}

// Jet of phi^* A at x for phi(x) = z + M (x - z).
FieldJet affine_pullback_jet(const GaugeField& conn, const Point& z, const Eigen::Matrix4d& M, const Point& x) {
  const FieldJet j = conn.jet(z + M * (x - z));
  FieldJet out;
  for (int nu = 0; nu < 4; ++nu)
    for (int al = 0; al < 4; ++al) out.value[nu] += j.value[al] * M(al, nu);
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      Quat acc;
      for (int be = 0; be < 4; ++be)
        for (int al = 0; al < 4; ++al) acc += j.d[be][al] * (M(be, mu) * M(al, nu));
      out.d[mu][nu] = acc;
    }
  return out;
}

OneFormD affine_pullback_value(const GaugeField& conn, const Point& z, const Eigen::Matrix4d& M, const Point& x) {
  const OneFormD v = conn(z + M * (x - z));
  OneFormD out;
  for (int nu = 0; nu < 4; ++nu)
    for (int al = 0; al < 4; ++al) out[nu] += v[al] * M(al, nu);
  return out;
}

double two_form_norm(const TwoFormD& f) { return std::sqrt(norm2(f)); }

void finish(DeformationField& d, const GaugeField& conn, const ProbeSet& probes) {
  d.kernel_residual = kernel_residual(conn, d.a, probes);
  d.in_kernel = d.kernel_residual <= 1e-4;
}

}  // namespace

const char* generator_name(Generator g) {
  switch (g) {
    case Generator::scaling: return "scaling";
    case Generator::rotation: return "rotation";
    case Generator::gauge: return "gauge";
    case Generator::adhm_path: return "adhm_path";
    case Generator::affine: return "affine";
    default: return "custom";
  }
}

ProbeSet probe_points(const Point& z, double r, int n, std::uint64_t seed) {
  CounterRng rng(seed, 0x70726f6265ULL);
  ProbeSet p;
  p.points.reserve(n);
  for (int i = 0; i < n; ++i) p.points.push_back(z + rng.in_ball(r));
  return p;
}

double kernel_residual(const GaugeField& conn, const GaugeField& a, const ProbeSet& probes) {
  double worst = 0.0;
  for (const Point& x : probes.points) worst = std::max(worst, two_form_norm(dplus(conn, a, x)));
  return worst;
}

GaugeField affine_flow_derivative(const GaugeField& conn, const Point& z, const Eigen::Matrix4d& G, double h) {
  auto jet = [conn, z, G, h](const Point& x) {
    return t_derivative([&](double t) { return affine_pullback_jet(conn, z, expm(t * G), x); }, h);
  };
  auto value = [conn, z, G, h](const Point& x) {
    auto f = [&](double t) { return affine_pullback_value(conn, z, expm(t * G), x); };
    const OneFormD d1 = (f(h) - f(-h)) * (1.0 / (2.0 * h));
    const OneFormD d2 = (f(0.5 * h) - f(-0.5 * h)) * (1.0 / h);
    return (d2 * 4.0 - d1) * (1.0 / 3.0);
  };
  return GaugeField(value, jet, {}, Provenance::deformation);
}

GaugeField horizontal_flow_derivative(const GaugeField& conn, const Point& z, const Eigen::Matrix4d& G) {
  auto jet = [conn, z, G](const Point& x) {
    const FieldJet j = conn.jet(x);
    const FieldHessian hs = conn.hessian(x);
    const TwoFormD f = curvature(j);
    const Point X = G * (x - z);
    FieldJet out;
    for (int nu = 0; nu < 4; ++nu)
      for (int mu = 0; mu < 4; ++mu) out.value[nu] += f(mu, nu) * X(mu);
    for (int rho = 0; rho < 4; ++rho) {
      // d_rho F_{mu nu} from the Hessian.
      TwoFormD df;
      for (int p = 0; p < 6; ++p) {
        const int mu = kPairs[p][0], nu = kPairs[p][1];
        df[p] = hs.dd[rho][mu][nu] - hs.dd[rho][nu][mu] + commutator(j.d[rho][mu], j.value[nu]) +
                commutator(j.value[mu], j.d[rho][nu]);
      }
      for (int nu = 0; nu < 4; ++nu)
        for (int mu = 0; mu < 4; ++mu) out.d[rho][nu] += f(mu, nu) * G(mu, rho) + df(mu, nu) * X(mu);
    }
    return out;
  };
  auto value = [conn, z, G](const Point& x) {
    const TwoFormD f = curvature(conn, x);
    const Point X = G * (x - z);
    OneFormD out;
    for (int nu = 0; nu < 4; ++nu)
      for (int mu = 0; mu < 4; ++mu) out[nu] += f(mu, nu) * X(mu);
    return out;
  };
  return GaugeField(value, jet, {}, Provenance::deformation);
}

DeformationField scaling_deformation(const GaugeField& conn, const Point& z, const ProbeSet& probes, double h) {
  DeformationField d;
  d.a = affine_flow_derivative(conn, z, Eigen::Matrix4d::Identity(), h);
  d.generator = Generator::scaling;
  d.label = "scaling";
  finish(d, conn, probes);
  return d;
}

Eigen::Matrix4d plane_rotation(int mu, int nu) {
  Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
  s(mu, nu) = 1.0;
  s(nu, mu) = -1.0;
  return s;
}

namespace {

Eigen::Matrix4d skew_from(const RealTwoForm<double>& e) {
  Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
  for (int p = 0; p < 6; ++p) s += e(p) * plane_rotation(kPairs[p][0], kPairs[p][1]);
  return s;
}

}  // namespace

Eigen::Matrix4d sd_rotation(int a) { return skew_from(sd_basis(a)); }
Eigen::Matrix4d asd_rotation(int a) { return skew_from(asd_basis(a)); }

std::pair<Quat, double> induced_sigma(const Eigen::Matrix4d& generator, const TwoFormD& f) {
  const TwoFormD fm = asd_part(f);
  const TwoFormD target = asd_part(form_rotation(generator, f));
  Eigen::Matrix<double, 18, 3> A;
  Eigen::Matrix<double, 18, 1> b;
  for (int s = 0; s < 3; ++s) {
    const TwoFormD col = ad(Quat::basis(s + 1), fm);
    for (int p = 0; p < 6; ++p) A.block<3, 1>(3 * p, s) = col[p].vec();
  }
  for (int p = 0; p < 6; ++p) b.segment<3>(3 * p) = target[p].vec();
  const Eigen::Vector3d sigma = A.completeOrthogonalDecomposition().solve(b);
  return {Quat::pure(sigma), (A * sigma - b).norm()};
}

DeformationField rotation_deformation(const GaugeField& conn, const Point& z, const Eigen::Matrix4d& generator,
                                      const ProbeSet& probes, RotationLift lift, double h) {
  if ((generator + generator.transpose()).norm() > 1e-12) throw DegenerateInput("rotation generator must be skew");
  DeformationField d;
  d.a = lift == RotationLift::pullback ? affine_flow_derivative(conn, z, generator, h)
                                       : horizontal_flow_derivative(conn, z, generator);
  d.generator = Generator::rotation;
  d.label = lift == RotationLift::pullback ? "rotation" : "rotation-horizontal";
  const auto [sigma, misfit] = induced_sigma(generator, curvature(conn, z));
  d.induced_sigma = sigma;
  d.induced_residual = misfit;
  finish(d, conn, probes);
  return d;
}

DeformationField gauge_deformation(const GaugeField& conn, const LieField& xi, const ProbeSet& probes, double h) {
  DeformationField d;
  d.a = GaugeField(
      [conn, xi, h](const Point& x) {
        const OneFormD a = conn(x);
        const Quat v = xi(x);
        OneFormD out;
        for (int mu = 0; mu < 4; ++mu) out[mu] = central_difference(xi, x, mu, h) + commutator(a[mu], v);
        return out;
      },
      {}, {}, Provenance::deformation);
  d.generator = Generator::gauge;
  d.label = "gauge";
  finish(d, conn, probes);
  return d;
}

DeformationField gauge_deformation(const GaugeField& conn, const Quat& xi, const ProbeSet& probes) {
  DeformationField d;
  auto jet = [conn, xi](const Point& x) {
    const FieldJet j = conn.jet(x);
    FieldJet out;
    for (int mu = 0; mu < 4; ++mu) {
      out.value[mu] = commutator(j.value[mu], xi);
      for (int rho = 0; rho < 4; ++rho) out.d[rho][mu] = commutator(j.d[rho][mu], xi);
    }
    return out;
  };
  d.a = GaugeField([jet](const Point& x) { return jet(x).value; }, jet, {}, Provenance::deformation);
  d.generator = Generator::gauge;
  d.label = "gauge";
  finish(d, conn, probes);
  return d;
}

DeformationField adhm_deformation(const AdhmData& data, const Quat& sigma, const ProbeSet& probes, double h) {
  const auto path = last_entry_path(data.lambda, sigma);
  DeformOptions opt;
  opt.steps = 2;
  opt.t_end = h;
  const auto fwd = deform(data, path, opt);
  const auto bwd = deform(data, [path](double t) { return path(-t); }, opt);
  const AdhmData p1 = fwd[1].data, p2 = fwd[2].data, m1 = bwd[1].data, m2 = bwd[2].data;
  auto jet = [p1, p2, m1, m2, h](const Point& x) {
    const FieldJet d1 = combine(inverted_connection_jet(p2, x), 1.0 / (2.0 * h), inverted_connection_jet(m2, x),
                                -1.0 / (2.0 * h));
    const FieldJet d2 =
        combine(inverted_connection_jet(p1, x), 1.0 / h, inverted_connection_jet(m1, x), -1.0 / h);
    return combine(d2, 4.0 / 3.0, d1, -1.0 / 3.0);
  };
  DeformationField d;
  d.a = GaugeField([jet](const Point& x) { return jet(x).value; }, jet, {}, Provenance::deformation);
  d.generator = Generator::adhm_path;
  d.label = "adhm_path";
  finish(d, inverted_connection(data), probes);
  return d;
}

double pairing(const TwoFormD& xi, const GaugeField& conn, const GaugeField& a, const Point& z) {
  return inner(xi, dminus(conn, a, z));
}

double pairing(const StandardTensor& xi, const GaugeField& conn, const GaugeField& a, const Point& z) {
  return pairing(xi.two_form(), conn, a, z);
}

double boundary_integral(const TwoFormD& xi, const GaugeField& a, double R, int order, const Point& z) {
  const QuadratureGrid g = sphere_grid(R, order, z);
  return integrate_three_form(g, [&](const Point& x) { return wedge_trace(inversion_pullback(xi, Point(x - z)), a(x)); });
}

PairingReport boundary_limit(const TwoFormD& xi, const GaugeField& a, const std::vector<double>& radii, int order,
                             const Point& z, const GaugeField& conn, double floor) {
  if (radii.empty()) throw ConfigError("boundary_limit needs at least one radius");
  PairingReport rep;
  rep.R_sequence = radii;
  for (double R : radii) rep.boundary_values.push_back(boundary_integral(xi, a, R, order, z));
  rep.value = rep.boundary_values.back();

  // Neville extrapolation to R = 0.
  std::vector<double> p = rep.boundary_values;
  const int n = static_cast<int>(p.size());
  for (int k = 1; k < n; ++k)
    for (int i = 0; i + k < n; ++i) p[i] = (radii[i] * p[i + 1] - radii[i + k] * p[i]) / (radii[i] - radii[i + k]);
  rep.extrapolated_limit = p[0];

  if (n >= 3) {
    const double e1 = std::abs(rep.boundary_values[n - 3] - rep.boundary_values[n - 2]);
    const double e2 = std::abs(rep.boundary_values[n - 2] - rep.boundary_values[n - 1]);
    const double scale = std::max(1.0, std::abs(rep.value));
    if (e2 <= 1e-13 * scale)
      rep.observed_order = std::numeric_limits<double>::infinity();
    else
      rep.observed_order = std::log(e1 / e2) / std::log(radii[n - 3] / radii[n - 2]);
  }

  rep.reference_value = pairing(xi, conn, a, z);
  const double k = std::numbers::pi * std::numbers::pi / 2.0;
  rep.relative_gap = std::abs(rep.extrapolated_limit - k * rep.reference_value) / std::max(std::abs(rep.reference_value) * k, floor);
  rep.constant_ratio = rep.reference_value != 0.0 ? rep.extrapolated_limit / rep.reference_value : 0.0;
  return rep;
}

CatalogReport deformation_catalog(const GaugeField& conn, const TwoFormD& xi, const Point& z, const ProbeSet& probes) {
  CatalogReport rep;
  auto add = [&](const DeformationField& d) {
    CatalogEntry e;
    e.label = d.label;
    e.pairing = pairing(xi, conn, d.a, z);
    e.kernel_residual = d.kernel_residual;
    e.induced_sigma = d.induced_sigma;
    if (std::abs(e.pairing) > rep.max_abs_pairing || rep.entries.empty()) {
      rep.max_abs_pairing = std::abs(e.pairing);
      rep.argmax = e.label;
    }
    rep.entries.push_back(e);
  };
  add(scaling_deformation(conn, z, probes));
  for (int a = 0; a < 3; ++a) {
    DeformationField d = rotation_deformation(conn, z, sd_rotation(a), probes);
    d.label = "sd_rotation[" + std::to_string(a) + "]";
    add(d);
  }
  for (int a = 0; a < 3; ++a) {
    DeformationField d = rotation_deformation(conn, z, asd_rotation(a), probes);
    d.label = "asd_rotation[" + std::to_string(a) + "]";
    add(d);
  }
  return rep;
}

}  // namespace ymw
