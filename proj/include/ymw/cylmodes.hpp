#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "ymw/adhm.hpp"
#include "ymw/fields.hpp"
#include "ymw/quadrature.hpp"
#include "ymw/rng.hpp"

namespace ymw {

// Invariant coframes on the unit sphere, normalized to unit L^2 norm:
//   left   sigma^L_a(p)(v) = Im(p-bar v)_a / (pi sqrt 2)
//   right  sigma^R_a(p)(v) = Im(v p-bar)_a / (pi sqrt 2)
enum class FrameSide { left, right };
const char* frame_side_name(FrameSide s);

// Covector components of sigma_a at p (p is normalized first).
Point frame_covector(FrameSide side, int a, const Point& p);

// su(2)-valued 1-forms on the unit sphere, given by their R^4 covector components.
using SphereForm = std::function<OneFormD(const Point&)>;

// sigma_a (x) leg.
SphereForm frame_form(FrameSide side, int a, const Quat& leg = Quat(1));

// Eigenvalue of *d on the frame from the Maurer-Cartan relations:
// d sigma^L_1 = -2 sigma^L_2 ^ sigma^L_3 (unnormalized), the right frame has the opposite sign.
double frame_eigenvalue(FrameSide side);
// Frame spanning Theta_{+2} and Theta_{-2}.
FrameSide plus_frame();
FrameSide minus_frame();

// *_theta d_theta alpha at p. alpha is extended off the sphere as P(x/|x|) alpha(x/|x|),
// differenced with step h, restricted to the tangent space and starred as iota_n(*_4 .).
OneFormD star_d_theta(const SphereForm& alpha, const Point& p, double h = 1e-3);

// || *d sigma - lambda sigma ||_{L^2} for one frame field.
double eigen_residual(FrameSide side, int a, int order = 8);

// L^2 inner product on the unit sphere (Euclidean on the Lie leg components).
double l2_inner(const SphereForm& a, const SphereForm& b, const QuadratureGrid& unit_sphere);

struct ModeCoefficients {
  Eigen::Matrix3d plus2 = Eigen::Matrix3d::Zero();   // frame index x Lie leg
  Eigen::Matrix3d minus2 = Eigen::Matrix3d::Zero();
  double residual_norm = 0.0;
  double total_norm = 0.0;

  // |total^2 - plus^2 - minus^2 - residual^2| / total^2.
  double pythagoras_gap() const;
};

// Projection onto (Theta_{+2} + Theta_{-2}) (x) su(2). The grid may have any
// radius and center; alpha is evaluated on the unit sphere.
ModeCoefficients project_modes(const SphereForm& alpha, const QuadratureGrid& sphere);

// alpha = iota_{d/dt} omega on the slice t = log r, pulled back to the unit sphere:
// alpha_nu(p) = r^2 sum_mu p_mu omega_{mu nu}(c + r p).
SphereForm cylinder_slice(const TwoFormField& omega, double r, const Point& center = Point::Zero());

// Eigenvalues of *d on restrictions of 1-forms with polynomial coefficients of
// degree <= degree (Galerkin, the space is invariant). Sorted ascending.
std::vector<double> galerkin_spectrum(int degree, int order = 12);

// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

// Reduced system on the cylinder [-T, T]:
//   coclosed channels  alpha' = eigenvalue * alpha + beta
//   closed channels    alpha' = beta, with the constraint rho = divergence * alpha.
enum class ChannelKind { coclosed, closed };

struct ModeChannel {
  std::string name;
  double eigenvalue = 0.0;
  ChannelKind kind = ChannelKind::coclosed;
  double divergence = 0.0;
};

struct ModeSystem {
  std::vector<ModeChannel> channels;

  int size() const { return static_cast<int>(channels.size()); }
  // Theta_{+2} (x) su(2), Theta_{-2} (x) su(2), one +3 and one -3 residual channel,
  // three closed channels on dY for the first spherical harmonics.
  static ModeSystem standard();
};

using ModeForcing = std::function<Eigen::VectorXd(double)>;

// Sum of three random sinusoids per channel; with sign_flipping each channel is
// passed through tanh(20 .) so it switches sign abruptly but stays smooth.
ModeForcing random_mode_forcing(const ModeSystem& sys, CounterRng& rng, bool sign_flipping, double scale = 1.0);

enum class SweepDirection { stable, forward };

struct ModeOdeOptions {
  int base_divisions = 2000;  // initial step T / base_divisions
  int max_halvings = 6;
  double probe_tol = 1e-8;
  int samples = 401;
  SweepDirection direction = SweepDirection::stable;
  double growth_limit = 1e6;
};

struct ModeTrajectory {
  double T = 0.0;
  std::vector<double> t;
  Eigen::MatrixXd alpha;  // samples x channels
  double step = 0.0;
  double probe_error = 0.0;
  int halvings = 0;
  double constraint_residual = 0.0;
};

// bc holds alpha_+(T) for positive channels and alpha(-T) for the others.
// RK4 with positive channels swept backward from T and the rest forward from -T.
// SweepDirection::forward sweeps everything from -T and throws StepUnstable
// when the trajectory grows beyond growth_limit times its data.
ModeTrajectory integrate_mode_system(const ModeSystem& sys, const ModeForcing& beta, double T,
                                     const Eigen::VectorXd& bc, const ModeOdeOptions& opt = {},
                                     const ModeForcing& rho = {});

// Violations are max over the sample grid of lhs - rhs.
struct ComparisonReport {
  int m = 2;
  double t0 = 0.0;
  double violation_a = 0.0;
  double violation_b_minus = 0.0;
  double violation_b_plus = 0.0;         // kernel e^{m(t-s)}
  double violation_b_plus_stated = 0.0;  // kernel e^{-m(s-t0)}, t <= t0 only
  double stated_violation_after_t0 = 0.0;
  double max_lhs_a = 0.0;
  double max_rhs_a = 0.0;
  bool pass = false;
};

// Checks of the comparison estimates for |eigenvalue| >= m (part a) and the
// +-m channels (part b) against the integrated trajectory.
ComparisonReport check_comparison(const ModeSystem& sys, const ModeTrajectory& traj, const ModeForcing& beta,
                                  int m = 2, double t0 = 0.0, double tol = 1e-6);

struct NeckResidual {
  double r = 0.0;
  double norm = 0.0;  // RMS pointwise norm over the sphere
};

struct NeckOptions {
  int order = 8;
  int nuisance_terms = 2;  // d + sum_j e_j (lambda/r)^{2j}
  int c_terms = 0;         // c + sum_j c_j (r/r0)^j
  double max_condition = 1e8;
  double standard_tol = 1e-5;
};

// Fit of the chosen dual part of F against c + lambda^2 iota^* d. c has the
// chosen duality and d the opposite one, so iota^* d has the chosen duality.
struct NeckFit {
  Duality dual = Duality::self_dual;
  TwoFormD c;
  TwoFormD d;
  Eigen::Matrix3d c_coef = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d d_coef = Eigen::Matrix3d::Zero();
  double lambda = 0.0;
  std::vector<NeckResidual> residuals;
  bool is_standard_d = false;
  double slope = 0.0;
  double condition = 0.0;
};

NeckFit fit_neck(const TwoFormField& curvature, const Point& center, double lambda, double r0,
                 const std::vector<double>& radii, Duality dual, const NeckOptions& opt = {});
NeckFit extract_neck_coefficients(const GaugeField& conn, const Point& center, double lambda, double r0,
                                  const std::vector<double>& radii, Duality dual, const NeckOptions& opt = {});

// Inverted instanton of `data` (unit_adhm(1 / lambda) gives a neck of scale lambda), put in
// radial gauge on [r_min / 2, r0] and fitted on the given radii.
NeckFit fit_instanton_neck(const AdhmData& data, double lambda, double r0, const std::vector<double>& radii,
                           Duality dual, const NeckOptions& opt = {});

// n radii spaced geometrically on [lo, hi].
std::vector<double> geometric_radii(double lo, double hi, int n);

}  // namespace ymw
