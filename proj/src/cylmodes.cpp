#include "ymw/cylmodes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <type_traits>

#include "ymw/errors.hpp"
#include "ymw/standard.hpp"

namespace ymw {

namespace {

constexpr double kFrameNorm = std::numbers::pi * std::numbers::sqrt2;

Point unit(const Point& p) {
  const double n = p.norm();
  if (n == 0.0) throw OriginSingularity("sphere form evaluated at the origin");
  return p / n;
}

OneFormD tangential(const OneFormD& a, const Point& n) {
  Quat radial;
  for (int mu = 0; mu < 4; ++mu) radial += a[mu] * n(mu);
  OneFormD out = a;
  for (int mu = 0; mu < 4; ++mu) out[mu] -= radial * n(mu);
  return out;
}

double form_dot(const OneFormD& a, const OneFormD& b) {
  double s = 0.0;
  for (int mu = 0; mu < 4; ++mu) s += a[mu].vec4().dot(b[mu].vec4());
  return s;
}

// Unit-sphere weights of a sphere grid and the matching unit-sphere points.
struct UnitNodes {
  std::vector<Point> p;
  std::vector<double> w;
};

UnitNodes unit_nodes(const QuadratureGrid& g) {
  if (g.geometry != Geometry::sphere) throw ConfigError("mode projection needs a sphere grid");
  UnitNodes u;
  u.p.reserve(g.size());
  u.w.reserve(g.size());
  const double scale = 1.0 / (g.R * g.R * g.R);
  for (std::size_t i = 0; i < g.size(); ++i) {
    u.p.push_back((g.nodes[i] - g.center) / g.R);
    u.w.push_back(g.weights[i] * scale);
  }
  return u;
}

double weighted_sum(const std::vector<double>& w, const std::vector<double>& v) {
  std::vector<double> t(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) t[i] = w[i] * v[i];
  return pairwise_sum(t);
}

}  // namespace

const char* frame_side_name(FrameSide s) { return s == FrameSide::left ? "left" : "right"; }

Point frame_covector(FrameSide side, int a, const Point& p) {
  const Quat q = Quat::from_vec4(unit(p));
  Point c;
  for (int mu = 0; mu < 4; ++mu) {
    const Quat e = Quat::basis(mu);
    const Quat v = side == FrameSide::left ? q.conj() * e : e * q.conj();
    c(mu) = v[a + 1];
  }
  return c / kFrameNorm;
}

SphereForm frame_form(FrameSide side, int a, const Quat& leg) {
  return [side, a, leg](const Point& p) {
    const Point c = frame_covector(side, a, p);
    OneFormD f;
    for (int mu = 0; mu < 4; ++mu) f[mu] = leg * c(mu);
    return f;
  };
}

double frame_eigenvalue(FrameSide side) { return side == FrameSide::left ? -2.0 : 2.0; }
FrameSide plus_frame() { return FrameSide::right; }
FrameSide minus_frame() { return FrameSide::left; }

OneFormD star_d_theta(const SphereForm& alpha, const Point& p, double h) {
  const Point n = unit(p);
  const auto ext = [&](const Point& x) { return tangential(alpha(unit(x)), unit(x)); };
  std::array<OneFormD, 4> d;
  for (int mu = 0; mu < 4; ++mu) d[mu] = central_difference(ext, n, mu, h);
  TwoFormD da;
  for (int k = 0; k < 6; ++k) {
    const int mu = kPairs[k][0], nu = kPairs[k][1];
    da[k] = d[mu][nu] - d[nu][mu];
  }
  // Tangential part: P da P with P = 1 - n n^T.
  const Eigen::Matrix4d P = Eigen::Matrix4d::Identity() - n * n.transpose();
  const TwoFormD tan = pullback(da, P);
  const TwoFormD s = hodge_star(tan);
  OneFormD out;
  for (int nu = 0; nu < 4; ++nu)
    for (int mu = 0; mu < 4; ++mu) out[nu] += s(mu, nu) * n(mu);
  return out;
}

double l2_inner(const SphereForm& a, const SphereForm& b, const QuadratureGrid& unit_sphere) {
  const UnitNodes u = unit_nodes(unit_sphere);
  std::vector<double> v(u.p.size());
  for (std::size_t i = 0; i < u.p.size(); ++i) v[i] = form_dot(a(u.p[i]), b(u.p[i]));
  return weighted_sum(u.w, v);
}

double eigen_residual(FrameSide side, int a, int order) {
  const QuadratureGrid g = sphere_grid(1.0, order);
  const SphereForm s = frame_form(side, a);
  const double lam = frame_eigenvalue(side);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const OneFormD r = star_d_theta(s, g.nodes[i]) - s(g.nodes[i]) * lam;
    v[i] = form_dot(r, r);
  }
  return std::sqrt(weighted_sum(g.weights, v));
}

double ModeCoefficients::pythagoras_gap() const {
  const double t2 = total_norm * total_norm;
  const double parts = plus2.squaredNorm() + minus2.squaredNorm() + residual_norm * residual_norm;
  return t2 > 0.0 ? std::abs(t2 - parts) / t2 : std::abs(parts);
}

ModeCoefficients project_modes(const SphereForm& alpha, const QuadratureGrid& sphere) {
  const UnitNodes u = unit_nodes(sphere);
  const std::size_t n = u.p.size();
  std::vector<OneFormD> vals(n);
  for (std::size_t i = 0; i < n; ++i) vals[i] = alpha(u.p[i]);

  ModeCoefficients out;
  const FrameSide sides[2] = {plus_frame(), minus_frame()};
  std::vector<double> v(n);
  for (int s = 0; s < 2; ++s) {
    Eigen::Matrix3d& m = s == 0 ? out.plus2 : out.minus2;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
          const Point c = frame_covector(sides[s], a, u.p[i]);
          double acc = 0.0;
          for (int mu = 0; mu < 4; ++mu) acc += c(mu) * vals[i][mu][b + 1];
          v[i] = acc;
        }
        m(a, b) = weighted_sum(u.w, v);
      }
  }

  std::vector<double> total(n), rest(n);
  for (std::size_t i = 0; i < n; ++i) {
    OneFormD r = vals[i];
    for (int s = 0; s < 2; ++s) {
      const Eigen::Matrix3d& m = s == 0 ? out.plus2 : out.minus2;
      for (int a = 0; a < 3; ++a) {
        const Point c = frame_covector(sides[s], a, u.p[i]);
        const Quat leg = Quat::pure(m.row(a).transpose());
        for (int mu = 0; mu < 4; ++mu) r[mu] -= leg * c(mu);
      }
    }
    total[i] = form_dot(vals[i], vals[i]);
    rest[i] = form_dot(r, r);
  }
  out.total_norm = std::sqrt(weighted_sum(u.w, total));
  out.residual_norm = std::sqrt(std::max(0.0, weighted_sum(u.w, rest)));
  return out;
}

SphereForm cylinder_slice(const TwoFormField& omega, double r, const Point& center) {
  return [omega, r, center](const Point& p) {
    const Point q = unit(p);
    const TwoFormD w = omega(center + r * q);
    OneFormD a;
    for (int nu = 0; nu < 4; ++nu)
      for (int mu = 0; mu < 4; ++mu) a[nu] += w(mu, nu) * (r * r * q(mu));
    return a;
  };
}

std::vector<double> galerkin_spectrum(int degree, int order) {
  if (degree < 0 || degree > 3) throw ConfigError("galerkin degree must be in 0..3");
  std::vector<std::array<int, 4>> monos;
  for (int a = 0; a <= degree; ++a)
    for (int b = 0; a + b <= degree; ++b)
      for (int c = 0; a + b + c <= degree; ++c)
        for (int d = 0; a + b + c + d <= degree; ++d) monos.push_back({a, b, c, d});

  std::vector<SphereForm> basis;
  for (const auto& e : monos)
    for (int k = 0; k < 4; ++k)
      basis.push_back([e, k](const Point& x) {
        double v = 1.0;
        for (int i = 0; i < 4; ++i) v *= std::pow(x(i), e[i]);
        OneFormD f;
        f[k] = Quat(v);
        return tangential(f, unit(x));
      });

  const QuadratureGrid g = sphere_grid(1.0, order);
  const std::size_t n = g.size();
  const int K = static_cast<int>(basis.size());
  std::vector<std::vector<OneFormD>> val(K, std::vector<OneFormD>(n)), img(K, std::vector<OneFormD>(n));
  for (int j = 0; j < K; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      val[j][i] = basis[j](g.nodes[i]);
      img[j][i] = star_d_theta(basis[j], g.nodes[i]);
    }

  Eigen::MatrixXd G(K, K), S(K, K);
  std::vector<double> v(n), w(n);
  for (int a = 0; a < K; ++a)
    for (int b = a; b < K; ++b) {
      for (std::size_t i = 0; i < n; ++i) {
        v[i] = form_dot(val[a][i], val[b][i]);
        w[i] = form_dot(val[a][i], img[b][i]);
      }
      G(a, b) = G(b, a) = weighted_sum(g.weights, v);
      S(a, b) = weighted_sum(g.weights, w);
      if (a != b) {
        for (std::size_t i = 0; i < n; ++i) w[i] = form_dot(val[b][i], img[a][i]);
        S(b, a) = weighted_sum(g.weights, w);
      }
    }

  // Orthonormal basis of the restricted span, then the symmetrized operator on it.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ge(G);
  const double cut = 1e-9 * ge.eigenvalues().cwiseAbs().maxCoeff();
  std::vector<int> keep;
  for (int i = 0; i < K; ++i)
    if (ge.eigenvalues()(i) > cut) keep.push_back(i);
  Eigen::MatrixXd Q(K, keep.size());
  for (std::size_t c = 0; c < keep.size(); ++c)
    Q.col(c) = ge.eigenvectors().col(keep[c]) / std::sqrt(ge.eigenvalues()(keep[c]));
  Eigen::MatrixXd H = Q.transpose() * S * Q;
  H = 0.5 * (H + H.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> he(H);
  std::vector<double> out(he.eigenvalues().data(), he.eigenvalues().data() + he.eigenvalues().size());
  std::sort(out.begin(), out.end());
  return out;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  if (lx.size() < 2) return 0.0;
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

ModeSystem ModeSystem::standard() {
  ModeSystem s;
  for (int sign : {+1, -1})
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        s.channels.push_back({std::string(sign > 0 ? "plus2" : "minus2") + "[" + std::to_string(a) + "," +
                                  std::to_string(b) + "]",
                              2.0 * sign, ChannelKind::coclosed, 0.0});
  s.channels.push_back({"plus3", 3.0, ChannelKind::coclosed, 0.0});
  s.channels.push_back({"minus3", -3.0, ChannelKind::coclosed, 0.0});
  for (int k = 0; k < 3; ++k)
    s.channels.push_back({"closed[" + std::to_string(k) + "]", 0.0, ChannelKind::closed, -std::sqrt(3.0)});
  return s;
}

namespace {

bool backward_channel(const ModeChannel& c, SweepDirection dir) {
  return dir == SweepDirection::stable && c.kind == ChannelKind::coclosed && c.eigenvalue > 0.0;
}

Eigen::MatrixXd sweep(const ModeSystem& sys, const ModeForcing& beta, double T, const Eigen::VectorXd& bc,
                      int steps, int samples, SweepDirection dir) {
  const int nc = sys.size();
  Eigen::VectorXd rate(nc);
  for (int i = 0; i < nc; ++i) rate(i) = sys.channels[i].kind == ChannelKind::coclosed ? sys.channels[i].eigenvalue : 0.0;
  Eigen::MatrixXd out(samples, nc);
  const int stride = steps / (samples - 1);
  const double h = 2.0 * T / steps;
  Eigen::MatrixXd forcing;
  if (beta) {
    forcing.resize(nc, 2 * steps + 1);
    for (int j = 0; j <= 2 * steps; ++j) forcing.col(j) = beta(-T + 0.5 * h * j);
  }

  for (int pass = 0; pass < 2; ++pass) {
    const bool back = pass == 1;
    std::vector<int> idx;
    for (int i = 0; i < nc; ++i)
      if (backward_channel(sys.channels[i], dir) == back) idx.push_back(i);
    if (idx.empty()) continue;
    const int k = static_cast<int>(idx.size());
    Eigen::VectorXd y(k), r(k);
    for (int j = 0; j < k; ++j) {
      y(j) = bc(idx[j]);
      r(j) = rate(idx[j]);
    }
    // Half-step node j sits at -T + j h / 2.
    const auto f = [&](int node, const Eigen::VectorXd& v) {
      Eigen::VectorXd out_v(k);
      for (int j = 0; j < k; ++j) out_v(j) = r(j) * v(j) + (beta ? forcing(idx[j], node) : 0.0);
      return out_v;
    };
    const double hs = back ? -h : h;
    const int dn = back ? -1 : 1;
    auto record = [&](int step) {
      const int s = back ? samples - 1 - step / stride : step / stride;
      for (int j = 0; j < k; ++j) out(s, idx[j]) = y(j);
    };
    record(0);
    for (int step = 0; step < steps; ++step) {
      const int node = back ? 2 * (steps - step) : 2 * step;
      const Eigen::VectorXd k1 = f(node, y);
      const Eigen::VectorXd k2 = f(node + dn, y + 0.5 * hs * k1);
      const Eigen::VectorXd k3 = f(node + dn, y + 0.5 * hs * k2);
      const Eigen::VectorXd k4 = f(node + 2 * dn, y + hs * k3);
      y += hs / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if ((step + 1) % stride == 0) record(step + 1);
    }
  }
  return out;
}

}  // namespace

ModeTrajectory integrate_mode_system(const ModeSystem& sys, const ModeForcing& beta, double T,
                                     const Eigen::VectorXd& bc, const ModeOdeOptions& opt, const ModeForcing& rho) {
  if (!(T > 0.0)) throw ConfigError("cylinder half-length must be positive");
  if (bc.size() != sys.size()) throw ConfigError("boundary data size does not match the mode system");
  if (opt.samples < 2) throw ConfigError("at least two samples are required");
  int steps = 2 * opt.base_divisions;
  if (steps % (opt.samples - 1) != 0) throw ConfigError("step count must be a multiple of samples - 1");

  ModeTrajectory tr;
  tr.T = T;
  Eigen::MatrixXd coarse = sweep(sys, beta, T, bc, steps, opt.samples, opt.direction);
  bool ok = false;
  for (int k = 0; k <= opt.max_halvings; ++k) {
    steps *= 2;
    Eigen::MatrixXd fine = sweep(sys, beta, T, bc, steps, opt.samples, opt.direction);
    const double scale = std::max(1.0, fine.cwiseAbs().maxCoeff());
    tr.probe_error = (fine - coarse).cwiseAbs().maxCoeff() / scale;
    coarse = std::move(fine);
    tr.halvings = k + 1;
    if (std::isfinite(tr.probe_error) && tr.probe_error <= opt.probe_tol) {
      ok = true;
      break;
    }
  }
  if (!ok) throw StepUnstable("mode integration did not reach the local error tolerance");
  tr.alpha = std::move(coarse);
  tr.step = 2.0 * T / steps;
  tr.t.resize(opt.samples);
  for (int i = 0; i < opt.samples; ++i) tr.t[i] = -T + 2.0 * T * i / (opt.samples - 1);

  if (opt.direction == SweepDirection::forward) {
    double data = bc.cwiseAbs().maxCoeff();
    if (beta)
      for (double t : tr.t) data = std::max(data, 2.0 * T * beta(t).cwiseAbs().maxCoeff());
    const double peak = tr.alpha.cwiseAbs().maxCoeff();
    if (peak > opt.growth_limit * std::max(data, 1e-300))
      throw StepUnstable("forward sweep of a growing mode amplifies the data beyond the growth limit");
  }

  if (rho)
    for (int s = 0; s < opt.samples; ++s) {
      const Eigen::VectorXd r = rho(tr.t[s]);
      for (int i = 0; i < sys.size(); ++i)
        if (sys.channels[i].kind == ChannelKind::closed)
          tr.constraint_residual =
              std::max(tr.constraint_residual, std::abs(r(i) - sys.channels[i].divergence * tr.alpha(s, i)));
    }
  return tr;
}

namespace {

// int_a^b f(s) ds, composite 8-point Gauss-Legendre on 16 panels.
template <typename F>
auto panel_integral(const F& f, double a, double b) {
  static const auto gl = gauss_legendre(8);
  constexpr int panels = 16;
  const double h = (b - a) / panels;
  using R = std::decay_t<decltype(f(a))>;
  R acc{};
  if constexpr (!std::is_arithmetic_v<R>) acc.setZero();
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (int i = 0; i < gl.first.size(); ++i) acc += (0.5 * h * gl.second(i)) * f(lo + 0.5 * h * (gl.first(i) + 1.0));
  }
  return acc;
}

}  // namespace

ComparisonReport check_comparison(const ModeSystem& sys, const ModeTrajectory& traj, const ModeForcing& beta, int m,
                                  double t0, double tol) {
  ComparisonReport rep;
  rep.m = m;
  const int ns = static_cast<int>(traj.t.size());
  const double T = traj.T;
  int i0 = 0;
  for (int i = 1; i < ns; ++i)
    if (std::abs(traj.t[i] - t0) < std::abs(traj.t[i0] - t0)) i0 = i;
  rep.t0 = traj.t[i0];
  const double md = m;

  std::vector<int> high, minus, plus;
  for (int i = 0; i < sys.size(); ++i) {
    const ModeChannel& c = sys.channels[i];
    if (c.kind != ChannelKind::coclosed) continue;
    if (std::abs(c.eigenvalue) >= md - 1e-12) high.push_back(i);
    if (std::abs(c.eigenvalue + md) < 1e-12) minus.push_back(i);
    if (std::abs(c.eigenvalue - md) < 1e-12) plus.push_back(i);
  }
  const auto bnorm = [&](const std::vector<int>& idx, double s) {
    if (!beta) return 0.0;
    const Eigen::VectorXd b = beta(s);
    double acc = 0.0;
    for (int i : idx) acc += b(i) * b(i);
    return std::sqrt(acc);
  };

  double va = -INFINITY, vbm = -INFINITY, vbp = -INFINITY, vbs = -INFINITY, vafter = -INFINITY;
  for (int s = 0; s < ns; ++s) {
    const double t = traj.t[s];

    double lhs = 0.0;
    for (int i : high) {
      const double mu = sys.channels[i].eigenvalue;
      const double h = mu > 0.0 ? std::exp(mu * (t - T)) * traj.alpha(ns - 1, i) : std::exp(mu * (t + T)) * traj.alpha(0, i);
      lhs += (traj.alpha(s, i) - h) * (traj.alpha(s, i) - h);
    }
    lhs = std::sqrt(lhs);
    const auto ka = [&](double u) { return bnorm(high, u) * std::exp(-md * std::abs(t - u)); };
    const double rhs = (t > -T ? panel_integral(ka, -T, t) : 0.0) + (t < T ? panel_integral(ka, t, T) : 0.0);
    rep.max_lhs_a = std::max(rep.max_lhs_a, lhs);
    rep.max_rhs_a = std::max(rep.max_rhs_a, rhs);
    va = std::max(va, lhs - rhs);

    const auto diff = [&](const std::vector<int>& idx, double rate) {
      double acc = 0.0;
      for (int i : idx) {
        const double d = traj.alpha(s, i) - std::exp(rate * (t - rep.t0)) * traj.alpha(i0, i);
        acc += d * d;
      }
      return std::sqrt(acc);
    };
    // Kernels against the -m channels, then the +m channels sharp and as stated.
    const Eigen::Vector3d rb = panel_integral(
        [&](double u) {
          const Eigen::VectorXd b = beta ? beta(u) : Eigen::VectorXd::Zero(sys.size());
          const auto nrm = [&](const std::vector<int>& idx) {
            double acc = 0.0;
            for (int i : idx) acc += b(i) * b(i);
            return std::sqrt(acc);
          };
          const double bm = nrm(minus), bp = nrm(plus);
          return Eigen::Vector3d(bm * std::exp(-md * (t - u)), bp * std::exp(md * (t - u)),
                                 bp * std::exp(-md * (u - rep.t0)));
        },
        rep.t0, t).cwiseAbs();
    if (!minus.empty()) {
      const double l = diff(minus, -md);
      vbm = std::max(vbm, l - rb(0));
    }
    if (!plus.empty()) {
      const double l = diff(plus, md);
      const double sharp = rb(1);
      const double stated = rb(2);
      vbp = std::max(vbp, l - sharp);
      if (t <= rep.t0)
        vbs = std::max(vbs, l - stated);
      else
        vafter = std::max(vafter, l - stated);
    }
  }
  const auto fin = [](double v) { return std::isfinite(v) ? v : 0.0; };
  rep.violation_a = fin(va);
  rep.violation_b_minus = fin(vbm);
  rep.violation_b_plus = fin(vbp);
  rep.violation_b_plus_stated = fin(vbs);
  rep.stated_violation_after_t0 = fin(vafter);
  rep.pass = rep.violation_a <= tol && rep.violation_b_minus <= tol && rep.violation_b_plus <= tol &&
             rep.violation_b_plus_stated <= tol;
  return rep;
}

NeckFit fit_neck(const TwoFormField& curvature, const Point& center, double lambda, double r0,
                 const std::vector<double>& radii, Duality dual, const NeckOptions& opt) {
  if (radii.empty()) throw ConfigError("neck fit needs at least one radius");
  if (!(lambda > 0.0)) throw ConfigError("neck scale must be positive");
  for (double r : radii)
    if (!(r > 0.0) || r > r0) throw ConfigError("neck radii must lie in (0, r0]");
  const Duality other = dual == Duality::self_dual ? Duality::anti_self_dual : Duality::self_dual;
  const int J = opt.nuisance_terms, Jc = opt.c_terms;
  const int K = 9 * (2 + J + Jc);

  struct Node {
    double r, w;
    Eigen::Matrix3d target;
    std::array<Eigen::Matrix3d, 9> image;  // coefficients of iota^* E_ab
  };
  std::vector<Node> nodes;
  for (double r : radii) {
    const QuadratureGrid g = sphere_grid(r, opt.order, center);
    for (std::size_t i = 0; i < g.size(); ++i) {
      Node nd;
      nd.r = r;
      nd.w = g.weights[i];
      nd.target = coefficients(curvature(g.nodes[i]), dual);
      const Point y = g.nodes[i] - center;
      for (int e = 0; e < 9; ++e) {
        Eigen::Matrix3d E = Eigen::Matrix3d::Zero();
        E(e / 3, e % 3) = 1.0;
        nd.image[e] = coefficients(inversion_pullback(from_coefficients(E, other), y), dual);
      }
      nodes.push_back(nd);
    }
  }

  const Eigen::Index rows = static_cast<Eigen::Index>(nodes.size()) * 9;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, K);
  Eigen::VectorXd b(rows);
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    const Node& nd = nodes[n];
    const double sw = std::sqrt(nd.w / (nd.r * nd.r * nd.r));
    for (int e = 0; e < 9; ++e) {
      const Eigen::Index row = static_cast<Eigen::Index>(n) * 9 + e;
      const int ra = e / 3, rb = e % 3;
      b(row) = sw * nd.target(ra, rb);
      A(row, e) = sw;
      for (int j = 1; j <= Jc; ++j) A(row, 9 * (1 + J + j) + e) = sw * std::pow(nd.r / r0, j);
      for (int c = 0; c < 9; ++c) {
        const double v = sw * lambda * lambda * nd.image[c](ra, rb);
        A(row, 9 + c) = v;
        for (int j = 1; j <= J; ++j) A(row, 9 * (1 + j) + c) = v * std::pow(lambda / nd.r, 2 * j);
      }
    }
  }

  Eigen::VectorXd colscale = A.colwise().norm().transpose();
  for (int c = 0; c < K; ++c)
    if (colscale(c) == 0.0) colscale(c) = 1.0;
  const Eigen::MatrixXd As = A * colscale.cwiseInverse().asDiagonal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(As);
  const Eigen::MatrixXd R = qr.matrixQR().topRows(K).triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(R);
  const auto& sv = svd.singularValues();
  NeckFit fit;
  fit.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
  if (!(fit.condition <= opt.max_condition)) throw IllConditionedFit("neck design matrix is ill-conditioned");
  const Eigen::VectorXd x = qr.solve(b).cwiseQuotient(colscale);

  fit.dual = dual;
  fit.lambda = lambda;
  for (int e = 0; e < 9; ++e) {
    fit.c_coef(e / 3, e % 3) = x(e);
    fit.d_coef(e / 3, e % 3) = x(9 + e);
  }
  fit.c = from_coefficients(fit.c_coef, dual);
  fit.d = from_coefficients(fit.d_coef, other);
  fit.is_standard_d = is_standard(fit.d_coef, opt.standard_tol).standard;

  std::vector<double> rs, ns;
  std::size_t n = 0;
  for (double r : radii) {
    std::vector<double> w, v;
    for (; n < nodes.size() && nodes[n].r == r; ++n) {
      Eigen::Matrix3d model = fit.c_coef;
      for (int c = 0; c < 9; ++c) model += lambda * lambda * fit.d_coef(c / 3, c % 3) * nodes[n].image[c];
      const TwoFormD res = from_coefficients<double>(nodes[n].target - model, dual);
      w.push_back(nodes[n].w);
      v.push_back(norm2(res));
    }
    const double area = pairwise_sum(w);
    const double rms = std::sqrt(weighted_sum(w, v) / area);
    fit.residuals.push_back({r, rms});
    rs.push_back(r);
    ns.push_back(rms);
  }
  fit.slope = log_log_slope(rs, ns);
  return fit;
}

NeckFit extract_neck_coefficients(const GaugeField& conn, const Point& center, double lambda, double r0,
                                  const std::vector<double>& radii, Duality dual, const NeckOptions& opt) {
  return fit_neck(curvature_field(conn), center, lambda, r0, radii, dual, opt);
}

}  // namespace ymw

namespace ymw {

ModeForcing random_mode_forcing(const ModeSystem& sys, CounterRng& rng, bool sign_flipping, double scale) {
  const int n = sys.size();
  Eigen::MatrixXd amp(n, 3), freq(n, 3), phase(n, 3);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < 3; ++k) {
      amp(i, k) = scale * rng.normal();
      freq(i, k) = rng.uniform(0.25, 6.0);
      phase(i, k) = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
  return [amp, freq, phase, sign_flipping, n](double t) {
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
      double v = 0.0;
      for (int k = 0; k < 3; ++k) v += amp(i, k) * std::sin(freq(i, k) * t + phase(i, k));
      b(i) = sign_flipping ? std::abs(amp(i, 0)) * std::tanh(20.0 * v) : v;
    }
    return b;
  };
}

NeckFit fit_instanton_neck(const AdhmData& data, double lambda, double r0, const std::vector<double>& radii,
                           Duality dual, const NeckOptions& opt) {
  if (radii.empty()) throw ConfigError("neck fit needs at least one radius");
  const GaugeField conn = inverted_connection(data);
  const double r_min = *std::min_element(radii.begin(), radii.end());
  const RadialGauge rg = radial_gauge(conn, Point::Zero(), {0.5 * r_min, r0});
  const GaugeTransform g = rg.transform;
  const TwoFormField f = [conn, g](const Point& x) { return transformed_curvature(conn, g, x); };
  return fit_neck(f, Point::Zero(), lambda, r0, radii, dual, opt);
}

std::vector<double> geometric_radii(double lo, double hi, int n) {
  if (n < 1 || !(lo > 0.0) || hi < lo) throw ConfigError("radii need 0 < lo <= hi and n >= 1");
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) r[i] = n == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return r;
}

}  // namespace ymw
