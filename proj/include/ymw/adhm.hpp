#pragma once

#include <functional>
#include <vector>

#include "json.hpp"

#include "ymw/fields.hpp"
#include "ymw/quat.hpp"

namespace ymw {

// kappa x kappa matrix B and 1 x kappa row lambda over H.
struct AdhmData {
  QMatrix B;
  QMatrix lambda;

  int kappa() const { return static_cast<int>(B.rows()); }
};

// [w, x, y, z].
Quat quat_from_json(const nlohmann::json& j);
nlohmann::json quat_to_json(const Quat& q);

AdhmData adhm_from_json(const nlohmann::json& j);
nlohmann::json adhm_to_json(const AdhmData& d);

// Basic instanton: kappa = 1, B = 0, lambda = scale.
AdhmData unit_adhm(double scale = 1.0);

struct SweepOptions {
  int grid_per_axis = 9;
  int refine_starts = 4;
  double rank_tol = 1e-6;
  double a1_tol = 1e-10;
};

struct AdhmValidation {
  double a1_residual = 0.0;
  double symmetry_residual = 0.0;  // |B - B^T|
  double a2_min_sv = 0.0;
  Point a2_witness = Point::Zero();
  double sweep_radius = 0.0;
  bool pass = false;
};

// |Im(B*B + lambda* lambda)| over the off-diagonal part.
double a1_residual(const AdhmData& d);
// Smallest singular value of (lambda; B - x I).
double a2_singular_value(const AdhmData& d, const Point& x);
AdhmValidation validate(const AdhmData& d, const SweepOptions& opt = {});

// u = [lambda (B - xI)^{-1}]^*, a kappa x 1 column.
QMatrix u_field(const AdhmData& d, const Point& x);

// A = Im(u^* du) / (1 + |u|^2) with analytic first derivatives.
FieldJet connection_jet(const AdhmData& d, const Point& x);
// The same construction in inverted coordinates y, regular at y = 0.
FieldJet inverted_connection_jet(const AdhmData& d, const Point& y);

GaugeField connection(const AdhmData& d);
GaugeField inverted_connection(const AdhmData& d);

// 2 sum_j lambda_j (e1 (x) i + e2 (x) j + e3 (x) k) lambda_j^*.
TwoFormD curvature_at_zero(const AdhmData& d);

// Off-diagonal imaginary parts of B*B + lambda* lambda, stacked as reals.
Eigen::VectorXd adhm_constraint(const QMatrix& B, const QMatrix& lambda);

struct DeformOptions {
  int steps = 20;
  double t_end = 1.0;
  int max_newton = 30;
  int max_halvings = 6;
  double tol = 1e-12;
  double rank_floor = 1e-8;
  bool symmetric = true;  // keep B = B^T along the path
};

struct DeformStep {
  double t = 0.0;
  AdhmData data;
  double residual = 0.0;
  double min_sv = 0.0;       // smallest singular value of the linearization
  double velocity = 0.0;     // |dB/dt| predicted by the linearization
  double step_norm = 0.0;    // |B_k - B_{k-1}|
  int newton_iterations = 0;
};

// Continuation of B along lambda(t) keeping the ADHM constraint, with
// minimum-norm Gauss-Newton corrections.
std::vector<DeformStep> deform(const AdhmData& start, const std::function<QMatrix(double)>& lambda_path,
                               const DeformOptions& opt = {});

// lambda(t) = lambda + t (0, ..., 0, sigma).
std::function<QMatrix(double)> last_entry_path(const QMatrix& lambda, const Quat& sigma);

}  // namespace ymw
