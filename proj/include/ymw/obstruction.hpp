#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "ymw/adhm.hpp"
#include "ymw/fields.hpp"
#include "ymw/standard.hpp"

namespace ymw {

enum class Generator { scaling, rotation, gauge, adhm_path, affine, custom };
const char* generator_name(Generator g);

struct DeformationField {
  GaugeField a;
  Generator generator = Generator::custom;
  std::string label;
  double kernel_residual = 0.0;  // max |D+ a| over the probe set
  bool in_kernel = false;
  Quat induced_sigma;            // rotations: sigma with (D- a)(z) = ad_sigma F(z)
  double induced_residual = 0.0; // least-squares misfit of induced_sigma
};

struct ProbeSet {
  std::vector<Point> points;
};

// n points uniform in the ball of radius r about z.
ProbeSet probe_points(const Point& z, double r = 1.0, int n = 50, std::uint64_t seed = 1);

double kernel_residual(const GaugeField& conn, const GaugeField& a, const ProbeSet& probes);

// Deformation d/dt|_0 phi_t^* A for phi_t(x) = z + exp(t G)(x - z), by central
// differences in t with one Richardson step; jets are differenced the same way.
GaugeField affine_flow_derivative(const GaugeField& conn, const Point& z, const Eigen::Matrix4d& G, double h = 1e-4);

// Horizontal lift iota_X F_A of the linear vector field X(x) = G (x - z).
GaugeField horizontal_flow_derivative(const GaugeField& conn, const Point& z, const Eigen::Matrix4d& G);

DeformationField scaling_deformation(const GaugeField& conn, const Point& z, const ProbeSet& probes, double h = 1e-4);

enum class RotationLift { pullback, horizontal };

// so(4) generator fixing z. The induced sigma is fitted from the form-leg
// action of the generator on F(z).
DeformationField rotation_deformation(const GaugeField& conn, const Point& z, const Eigen::Matrix4d& generator,
                                      const ProbeSet& probes, RotationLift lift = RotationLift::pullback,
                                      double h = 1e-4);

// Generators of so(4): (mu nu) plane rotations, and the SD/ASD combinations
// e.g. sd_rotation(0) = (12) + (34), asd_rotation(0) = (12) - (34).
Eigen::Matrix4d plane_rotation(int mu, int nu);
Eigen::Matrix4d sd_rotation(int a);
Eigen::Matrix4d asd_rotation(int a);

// sigma minimizing |form_rotation(G, F) - ad_sigma F| and the misfit.
std::pair<Quat, double> induced_sigma(const Eigen::Matrix4d& generator, const TwoFormD& f);

using LieField = std::function<Quat(const Point&)>;

// a = D_A xi = d xi + [A, xi].
DeformationField gauge_deformation(const GaugeField& conn, const LieField& xi, const ProbeSet& probes,
                                   double h = 1e-4);
DeformationField gauge_deformation(const GaugeField& conn, const Quat& xi, const ProbeSet& probes);

// a = d/dt of the inverted field along lambda_t = lambda + t (0, .., 0, sigma)
// with B_t from the continuation solver.
DeformationField adhm_deformation(const AdhmData& data, const Quat& sigma, const ProbeSet& probes, double h = 1e-3);

// <xi, (D-_A a)(z)>.
double pairing(const TwoFormD& xi, const GaugeField& conn, const GaugeField& a, const Point& z);
double pairing(const StandardTensor& xi, const GaugeField& conn, const GaugeField& a, const Point& z);

struct PairingReport {
  double value = 0.0;  // boundary integral at the smallest radius
  std::vector<double> R_sequence;
  std::vector<double> boundary_values;
  double extrapolated_limit = 0.0;
  double reference_value = 0.0;  // <xi, (D- a)(z)>
  double relative_gap = 0.0;
  double observed_order = 0.0;   // +inf when the values agree to rounding
  double constant_ratio = 0.0;   // extrapolated / reference
};

// int_{S_R(z)} Tr(iota_z^* xi ^ a) for each R, polynomial extrapolation to R = 0,
// compared with (pi^2 / 2) <xi, (D-_A a)(z)>.
PairingReport boundary_limit(const TwoFormD& xi, const GaugeField& a, const std::vector<double>& radii, int order,
                             const Point& z = Point::Zero(), const GaugeField& conn = zero_field(),
                             double floor = 1e-12);

double boundary_integral(const TwoFormD& xi, const GaugeField& a, double R, int order, const Point& z = Point::Zero());

struct CatalogEntry {
  std::string label;
  double pairing = 0.0;
  double kernel_residual = 0.0;
  Quat induced_sigma;
};

struct CatalogReport {
  std::vector<CatalogEntry> entries;
  double max_abs_pairing = 0.0;
  std::string argmax;
};

// Scaling plus the six so(4) rotations about z, paired against xi.
CatalogReport deformation_catalog(const GaugeField& conn, const TwoFormD& xi, const Point& z, const ProbeSet& probes);

}  // namespace ymw
