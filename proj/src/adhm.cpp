#include "ymw/adhm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ymw {

Quat quat_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) throw ConfigError("quaternion must be an array [w, x, y, z]");
  for (const auto& v : j)
    if (!v.is_number()) throw ConfigError("quaternion entries must be numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

nlohmann::json quat_to_json(const Quat& q) { return nlohmann::json::array({q.w, q.x, q.y, q.z}); }

AdhmData adhm_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("ADHM data must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (key != "kappa" && key != "B" && key != "lambda") throw ConfigError("unknown ADHM key: " + key);
  if (!j.contains("kappa") || !j.contains("B") || !j.contains("lambda"))
    throw ConfigError("ADHM data requires kappa, B and lambda");
  if (!j["kappa"].is_number_integer()) throw ConfigError("kappa must be an integer");
  const int k = j["kappa"].get<int>();
  if (k < 1) throw ConfigError("kappa must be positive");
  const auto& jb = j["B"];
  const auto& jl = j["lambda"];
  if (!jb.is_array() || static_cast<int>(jb.size()) != k) throw ConfigError("B must have kappa rows");
  if (!jl.is_array() || static_cast<int>(jl.size()) != k) throw ConfigError("lambda must have kappa entries");
  AdhmData d{QMatrix(k, k), QMatrix(1, k)};
  for (int r = 0; r < k; ++r) {
    if (!jb[r].is_array() || static_cast<int>(jb[r].size()) != k) throw ConfigError("B must be square");
    for (int c = 0; c < k; ++c) d.B(r, c) = quat_from_json(jb[r][c]);
    d.lambda(0, r) = quat_from_json(jl[r]);
  }
  return d;
}

nlohmann::json adhm_to_json(const AdhmData& d) {
  nlohmann::json j;
  j["kappa"] = d.kappa();
  j["B"] = nlohmann::json::array();
  for (int r = 0; r < d.kappa(); ++r) {
    auto row = nlohmann::json::array();
    for (int c = 0; c < d.kappa(); ++c) row.push_back(quat_to_json(d.B(r, c)));
    j["B"].push_back(row);
  }
  j["lambda"] = nlohmann::json::array();
  for (int c = 0; c < d.kappa(); ++c) j["lambda"].push_back(quat_to_json(d.lambda(0, c)));
  return j;
}

AdhmData unit_adhm(double scale) {
  AdhmData d{QMatrix(1, 1), QMatrix(1, 1)};
  d.lambda(0, 0) = Quat(scale);
  return d;
}

double a1_residual(const AdhmData& d) {
  return (d.B.adjoint() * d.B + d.lambda.adjoint() * d.lambda).imag().norm();
}

double a2_singular_value(const AdhmData& d, const Point& x) {
  const int k = d.kappa();
  const Quat xq = Quat::from_vec4(x);
  QMatrix m(k + 1, k);
  for (int c = 0; c < k; ++c) m(0, c) = d.lambda(0, c);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) m(r + 1, c) = d.B(r, c) - (r == c ? xq : Quat());
  return smallest_singular_value(m);
}

namespace {

// Nelder-Mead on R^4 restricted to a ball (points outside are pushed back).
Point nelder_mead(const std::function<double(const Point&)>& f, Point x0, double step, double radius, int iters) {
  auto clamp = [radius](Point p) {
    const double n = p.norm();
    return n > radius ? Point(p * (radius / n)) : p;
  };
  std::array<Point, 5> s;
  std::array<double, 5> v{};
  s[0] = clamp(x0);
  for (int i = 0; i < 4; ++i) {
    Point e = Point::Zero();
    e(i) = step;
    s[i + 1] = clamp(x0 + e);
  }
  for (int i = 0; i < 5; ++i) v[i] = f(s[i]);
  for (int it = 0; it < iters; ++it) {
    std::array<int, 5> ord{0, 1, 2, 3, 4};
    std::sort(ord.begin(), ord.end(), [&](int a, int b) { return v[a] < v[b] || (v[a] == v[b] && a < b); });
    std::array<Point, 5> s2;
    std::array<double, 5> v2{};
    for (int i = 0; i < 5; ++i) {
      s2[i] = s[ord[i]];
      v2[i] = v[ord[i]];
    }
    s = s2;
    v = v2;
    if (v[4] - v[0] < 1e-15 * (1.0 + std::abs(v[0])) && (s[4] - s[0]).norm() < 1e-12) break;
    Point c = Point::Zero();
    for (int i = 0; i < 4; ++i) c += s[i];
    c /= 4.0;
    const Point xr = clamp(c + (c - s[4]));
    const double fr = f(xr);
    if (fr < v[0]) {
      const Point xe = clamp(c + 2.0 * (c - s[4]));
      const double fe = f(xe);
      if (fe < fr) {
        s[4] = xe;
        v[4] = fe;
      } else {
        s[4] = xr;
        v[4] = fr;
      }
    } else if (fr < v[3]) {
      s[4] = xr;
      v[4] = fr;
    } else {
      const Point xc = clamp(c + 0.5 * (s[4] - c));
      const double fc = f(xc);
      if (fc < v[4]) {
        s[4] = xc;
        v[4] = fc;
      } else {
        for (int i = 1; i < 5; ++i) {
          s[i] = s[0] + 0.5 * (s[i] - s[0]);
          v[i] = f(s[i]);
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i < 5; ++i)
    if (v[i] < v[best]) best = i;
  return s[best];
}

}  // namespace

AdhmValidation validate(const AdhmData& d, const SweepOptions& opt) {
  if (d.B.rows() != d.B.cols() || d.lambda.rows() != 1 || d.lambda.cols() != d.B.rows())
    throw DegenerateInput("inconsistent ADHM shapes");
  AdhmValidation out;
  out.a1_residual = a1_residual(d);
  out.symmetry_residual = (d.B - d.B.transpose()).norm();
  out.sweep_radius = 2.0 * (d.B.norm() + d.lambda.norm()) + 1.0;
  const double R = out.sweep_radius;
  const int n = std::max(opt.grid_per_axis, 2);
  auto f = [&d](const Point& x) { return a2_singular_value(d, x); };

  std::vector<std::pair<double, Point>> samples;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int e = 0; e < n; ++e) {
          const Point x = Point(a, b, c, e) * (2.0 * R / (n - 1)) - Point::Constant(R);
          if (x.norm() > R) continue;
          samples.emplace_back(f(x), x);
        }
  // Only local minima of the grid are interesting; keep the lowest values.
  std::stable_sort(samples.begin(), samples.end(),
                   [](const auto& p, const auto& q) { return p.first < q.first; });
  out.a2_min_sv = samples.front().first;
  out.a2_witness = samples.front().second;
  const int starts = std::min<int>(opt.refine_starts, static_cast<int>(samples.size()));
  for (int s = 0; s < starts; ++s) {
    const Point x = nelder_mead(f, samples[s].second, 2.0 * R / (n - 1), R, 400);
    const double v = f(x);
    if (v < out.a2_min_sv) {
      out.a2_min_sv = v;
      out.a2_witness = x;
    }
  }
  const double scale = std::max(1.0, d.B.norm2() + d.lambda.norm2());
  out.pass = out.a1_residual <= opt.a1_tol * scale && out.symmetry_residual <= opt.a1_tol * scale &&
             out.a2_min_sv >= opt.rank_tol;
  return out;
}

QMatrix u_field(const AdhmData& d, const Point& x) {
  const int k = d.kappa();
  const QMatrix m = d.B - QMatrix::scalar(k, Quat::from_vec4(x));
  QMatrix minv;
  try {
    minv = inverse(m);
  } catch (const SingularMatrix&) {
    throw SingularPoint("B - xI is singular at the requested point");
  }
  return (d.lambda * minv).adjoint();
}

namespace {

struct RowJet {
  QMatrix w;
  std::array<QMatrix, 4> dw;
  std::array<std::array<QMatrix, 4>, 4> ddw;
};

FieldJet connection_from_row(const RowJet& r) {
  const std::size_t k = r.w.cols();
  double n = 1.0;
  for (std::size_t i = 0; i < k; ++i) n += r.w[i].norm2();
  std::array<Quat, 4> p{};
  for (int mu = 0; mu < 4; ++mu)
    for (std::size_t i = 0; i < k; ++i) p[mu] += r.w[i] * r.dw[mu][i].conj();
  FieldJet j;
  for (int mu = 0; mu < 4; ++mu) j.value[mu] = p[mu].imag() / n;
  for (int nu = 0; nu < 4; ++nu) {
    const double dn = 2.0 * p[nu].w;
    for (int mu = 0; mu < 4; ++mu) {
      Quat dp;
      for (std::size_t i = 0; i < k; ++i)
        dp += r.dw[nu][i] * r.dw[mu][i].conj() + r.w[i] * r.ddw[mu][nu][i].conj();
      j.d[nu][mu] = dp.imag() / n - p[mu].imag() * (dn / (n * n));
    }
  }
  return j;
}

}  // namespace

FieldJet connection_jet(const AdhmData& d, const Point& x) {
  const int k = d.kappa();
  QMatrix minv;
  try {
    minv = inverse(d.B - QMatrix::scalar(k, Quat::from_vec4(x)));
  } catch (const SingularMatrix&) {
    throw SingularPoint("B - xI is singular at the requested point");
  }
  RowJet r;
  r.w = d.lambda * minv;
  for (int mu = 0; mu < 4; ++mu) r.dw[mu] = (r.w * Quat::basis(mu)) * minv;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu)
      r.ddw[mu][nu] = (r.dw[mu] * Quat::basis(nu) + r.dw[nu] * Quat::basis(mu)) * minv;
  return connection_from_row(r);
}

FieldJet inverted_connection_jet(const AdhmData& d, const Point& y) {
  const int k = d.kappa();
  const Quat yb = Quat::from_vec4(y).conj();
  QMatrix kinv;
  try {
    kinv = inverse(yb * d.B - QMatrix::identity(k));
  } catch (const SingularMatrix&) {
    throw SingularPoint("conj(y) B - I is singular at the requested point");
  }
  const QMatrix p = kinv * yb;
  const QMatrix q = QMatrix::identity(k) - d.B * p;
  std::array<QMatrix, 4> x;
  for (int mu = 0; mu < 4; ++mu) x[mu] = kinv * Quat::basis(mu).conj();
  std::array<QMatrix, 4> xb;
  for (int mu = 0; mu < 4; ++mu) xb[mu] = d.B * x[mu];
  RowJet r;
  r.w = d.lambda * p;
  for (int mu = 0; mu < 4; ++mu) r.dw[mu] = d.lambda * (x[mu] * q);
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = mu; nu < 4; ++nu) {
      r.ddw[mu][nu] = -(d.lambda * ((x[nu] * (xb[mu] * q)) + (x[mu] * (xb[nu] * q))));
      r.ddw[nu][mu] = r.ddw[mu][nu];
    }
  return connection_from_row(r);
}

GaugeField connection(const AdhmData& d) {
  return GaugeField([d](const Point& x) { return connection_jet(d, x).value; },
                    [d](const Point& x) { return connection_jet(d, x); }, {}, Provenance::adhm);
}

GaugeField inverted_connection(const AdhmData& d) {
  return GaugeField([d](const Point& y) { return inverted_connection_jet(d, y).value; },
                    [d](const Point& y) { return inverted_connection_jet(d, y); }, {}, Provenance::adhm);
}

TwoFormD curvature_at_zero(const AdhmData& d) {
  TwoFormD f;
  for (int j = 0; j < d.kappa(); ++j) {
    const Quat l = d.lambda(0, j);
    for (int a = 0; a < 3; ++a) f += tensor(asd_basis(a), l * Quat::basis(a + 1) * l.conj());
  }
  return f * 2.0;
}

Eigen::VectorXd adhm_constraint(const QMatrix& B, const QMatrix& lambda) {
  const QMatrix m = B.adjoint() * B + lambda.adjoint() * lambda;
  const std::size_t k = B.rows();
  Eigen::VectorXd v(3 * k * (k - 1) / 2);
  int idx = 0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      v(idx++) = m(i, j).x;
      v(idx++) = m(i, j).y;
      v(idx++) = m(i, j).z;
    }
  return v;
}

namespace {

// Real coordinates of B: all entries, or the upper triangle when symmetric.
struct Coords {
  int k;
  bool symmetric;

  int dim() const { return symmetric ? 2 * k * (k + 1) : 4 * k * k; }

  QMatrix unit(int index) const {
    QMatrix e(k, k);
    int n = 0;
    for (int i = 0; i < k; ++i)
      for (int j = symmetric ? i : 0; j < k; ++j)
        for (int c = 0; c < 4; ++c, ++n)
          if (n == index) {
            e(i, j)[c] = 1.0;
            if (symmetric) e(j, i)[c] = 1.0;
          }
    return e;
  }

  QMatrix from_vector(const Eigen::VectorXd& v) const {
    QMatrix e(k, k);
    for (int n = 0; n < dim(); ++n) e += unit(n) * v(n);
    return e;
  }
};

Eigen::MatrixXd linearization(const QMatrix& B, const Coords& coords) {
  const Eigen::Index rows = 3 * B.rows() * (B.rows() - 1) / 2;
  Eigen::MatrixXd jac(rows, coords.dim());
  for (int n = 0; n < coords.dim(); ++n) {
    const QMatrix e = coords.unit(n);
    // L(E) = Im(E*B + B*E) restricted to the constrained entries.
    const QMatrix l = e.adjoint() * B + B.adjoint() * e;
    int idx = 0;
    for (std::size_t i = 0; i < B.rows(); ++i)
      for (std::size_t j = i + 1; j < B.rows(); ++j) {
        jac(idx++, n) = l(i, j).x;
        jac(idx++, n) = l(i, j).y;
        jac(idx++, n) = l(i, j).z;
      }
  }
  return jac;
}

double min_singular(const Eigen::MatrixXd& j) {
  if (j.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
  return svd.singularValues().minCoeff();
}

Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& j, const Eigen::VectorXd& rhs) {
  if (j.rows() == 0) return Eigen::VectorXd::Zero(j.cols());
  return j.completeOrthogonalDecomposition().solve(rhs);
}

}  // namespace

std::vector<DeformStep> deform(const AdhmData& start, const std::function<QMatrix(double)>& lambda_path,
                               const DeformOptions& opt) {
  const int k = start.kappa();
  const Coords coords{k, opt.symmetric};
  if (opt.symmetric && (start.B - start.B.transpose()).norm() > 1e-12)
    throw DegenerateInput("symmetric continuation requires B = B^T");
  if (opt.steps < 1) throw DegenerateInput("deform needs at least one step");

  auto psi = [](const QMatrix& B, const QMatrix& l) { return adhm_constraint(B, l); };
  auto velocity = [&](const QMatrix& B, double t, double dt) {
    const Eigen::VectorXd dpsi = (psi(B, lambda_path(t + dt)) - psi(B, lambda_path(t - dt))) / (2.0 * dt);
    return coords.from_vector(min_norm_solve(linearization(B, coords), -dpsi));
  };
  // Newton corrector; returns iterations or -1 on failure.
  auto correct = [&](QMatrix& B, const QMatrix& l, double& res) {
    for (int it = 0; it <= opt.max_newton; ++it) {
      const Eigen::VectorXd r = psi(B, l);
      res = r.size() ? r.norm() : 0.0;
      if (res <= opt.tol) return it;
      const Eigen::MatrixXd jac = linearization(B, coords);
      if (min_singular(jac) < opt.rank_floor) throw RankLoss("ADHM linearization lost rank");
      B += coords.from_vector(min_norm_solve(jac, -r));
    }
    return -1;
  };

  std::vector<DeformStep> path;
  const double h = opt.t_end / opt.steps;
  DeformStep s0;
  s0.t = 0.0;
  s0.data = AdhmData{start.B, lambda_path(0.0)};
  s0.newton_iterations = correct(s0.data.B, s0.data.lambda, s0.residual);
  if (s0.newton_iterations < 0) throw ContinuationStall("initial data could not be projected onto the constraint");
  s0.min_sv = min_singular(linearization(s0.data.B, coords));
  s0.velocity = velocity(s0.data.B, 0.0, h).norm();
  path.push_back(s0);

  for (int n = 1; n <= opt.steps; ++n) {
    const DeformStep& prev = path.back();
    const double t_target = n * h;
    double t = prev.t;
    QMatrix B = prev.data.B;
    int iters = 0;
    // Sub-steps with halving on failure; the recorded point is at t_target.
    double sub = t_target - t;
    int halvings = 0;
    while (t < t_target - 1e-15) {
      sub = std::min(sub, t_target - t);
      QMatrix trial = B + velocity(B, t, sub) * sub;
      double res = 0.0;
      const int it = correct(trial, lambda_path(t + sub), res);
      if (it < 0) {
        if (++halvings > opt.max_halvings) throw ContinuationStall("ADHM continuation stalled");
        sub *= 0.5;
        continue;
      }
      iters += it;
      B = trial;
      t += sub;
    }
    DeformStep s;
    s.t = t_target;
    s.data = AdhmData{B, lambda_path(t_target)};
    s.residual = psi(B, s.data.lambda).size() ? psi(B, s.data.lambda).norm() : 0.0;
    s.min_sv = min_singular(linearization(B, coords));
    if (s.min_sv < opt.rank_floor) throw RankLoss("ADHM linearization lost rank");
    s.velocity = velocity(B, t_target, h).norm();
    s.step_norm = (B - prev.data.B).norm();
    s.newton_iterations = iters;
    path.push_back(s);
  }
  return path;
}

std::function<QMatrix(double)> last_entry_path(const QMatrix& lambda, const Quat& sigma) {
  return [lambda, sigma](double t) {
    QMatrix l = lambda;
    l(0, l.cols() - 1) += sigma * t;
    return l;
  };
}

}  // namespace ymw
