#include "ymw/report.hpp"

#include <cstdint>
#include <cstdio>

#include "ymw/rng.hpp"

#ifndef YMW_VERSION
#define YMW_VERSION "0.0.0"
#endif

namespace ymw {

using nlohmann::json;

const char* version() { return YMW_VERSION; }

json conventions() {
  json c;
  c["quaternion"] = "q = w + x i + y j + z k, stored [w, x, y, z]";
  c["complex_embedding"] = "a + b j -> [[a, b], [-conj(b), conj(a)]]";
  c["two_form_order"] = json::array({"12", "13", "14", "23", "24", "34"});
  c["hodge_star"] = "*dx12 = dx34, *dx13 = -dx24, *dx14 = dx23";
  c["asd_basis"] = json::array({"dx12 - dx34", "dx13 + dx24", "dx14 - dx23"});
  c["sd_basis"] = json::array({"dx12 + dx34", "dx13 - dx24", "dx14 + dx23"});
  c["lie_basis"] = json::array({"i", "j", "k"});
  c["su2_inner"] = "<p, q> = -Tr(pq) = 2 Re(p conj(q))";
  c["trace"] = "Tr(pq) = 2 Re(pq)";
  c["three_form_basis"] = json::array({"dx234", "dx134", "dx124", "dx123"});
  c["curvature"] = "F = dA + A ^ A";
  c["gauge_action"] = "A^g = g A g^-1 - dg g^-1";
  c["frame_left"] = "Im(conj(p) dp) / (pi sqrt 2)";
  c["frame_right"] = "Im(dp conj(p)) / (pi sqrt 2)";
  c["frame_eigenvalues"] = {{frame_side_name(FrameSide::left), frame_eigenvalue(FrameSide::left)},
                            {frame_side_name(FrameSide::right), frame_eigenvalue(FrameSide::right)}};
  c["theta_plus2_frame"] = frame_side_name(plus_frame());
  c["sphere_orientation"] = "outward normal first";
  c["rng"] = CounterRng::kName;
  return c;
}

std::string conventions_fingerprint() {
  const std::string s = conventions().dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json to_json(const Point& x) { return json::array({x(0), x(1), x(2), x(3)}); }

json to_json(const TwoFormD& f) {
  json j = json::array();
  for (int p = 0; p < 6; ++p) j.push_back(quat_to_json(f[p]));
  return j;
}

json to_json(const Eigen::Matrix3d& m) {
  json j = json::array();
  for (int r = 0; r < 3; ++r) j.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
  return j;
}

json to_json(const AdhmValidation& v) {
  return {{"a1_residual", v.a1_residual},   {"symmetry_residual", v.symmetry_residual},
          {"a2_min_sv", v.a2_min_sv},       {"a2_witness", to_json(v.a2_witness)},
          {"sweep_radius", v.sweep_radius}, {"pass", v.pass}};
}

json to_json(const EnergyReport& e) {
  return {{"ym_energy", e.ym},
          {"norm_plus2", e.norm_plus2},
          {"norm_minus2", e.norm_minus2},
          {"chern_number", e.chern},
          {"chern_weil_gap", e.chern_weil_gap},
          {"integer_distance", e.integer_distance}};
}

json to_json(const StokesReport& s) {
  return {{"lhs", s.lhs},         {"rhs", s.rhs},
          {"residual", s.residual}, {"outer", s.outer},
          {"inner", s.inner},     {"volume_codiff", s.volume_codiff},
          {"volume_dplus", s.volume_dplus}};
}

json to_json(const ModeCoefficients& m) {
  return {{"plus2", to_json(m.plus2)},
          {"minus2", to_json(m.minus2)},
          {"residual_norm", m.residual_norm},
          {"total_norm", m.total_norm},
          {"pythagoras_gap", m.pythagoras_gap()}};
}

json to_json(const ComparisonReport& c) {
  return {{"m", c.m},
          {"t0", c.t0},
          {"violation_a", c.violation_a},
          {"violation_b_minus", c.violation_b_minus},
          {"violation_b_plus", c.violation_b_plus},
          {"violation_b_plus_stated", c.violation_b_plus_stated},
          {"stated_violation_after_t0", c.stated_violation_after_t0},
          {"max_lhs_a", c.max_lhs_a},
          {"max_rhs_a", c.max_rhs_a},
          {"pass", c.pass}};
}

json to_json(const NeckFit& f) {
  json res = json::array();
  for (const auto& r : f.residuals) res.push_back({{"r", r.r}, {"norm", r.norm}});
  return {{"dual", f.dual == Duality::self_dual ? "sd" : "asd"},
          {"c", to_json(f.c)},
          {"d", to_json(f.d)},
          {"c_coefficients", to_json(f.c_coef)},
          {"d_coefficients", to_json(f.d_coef)},
          {"lambda", f.lambda},
          {"residuals", res},
          {"is_standard_d", f.is_standard_d},
          {"slope", f.slope},
          {"condition", f.condition}};
}

json to_json(const PairingReport& p) {
  return {{"value", p.value},
          {"R_sequence", p.R_sequence},
          {"boundary_values", p.boundary_values},
          {"extrapolated_limit", p.extrapolated_limit},
          {"reference_value", p.reference_value},
          {"relative_gap", p.relative_gap},
          {"observed_order", p.observed_order},
          {"constant_ratio", p.constant_ratio}};
}

json to_json(const DeformStep& s) {
  return {{"t", s.t},
          {"residual", s.residual},
          {"min_sv", s.min_sv},
          {"velocity", s.velocity},
          {"step_norm", s.step_norm},
          {"newton_iterations", s.newton_iterations},
          {"data", adhm_to_json(s.data)}};
}

json to_json(const CatalogReport& c) {
  json e = json::array();
  for (const auto& x : c.entries)
    e.push_back({{"generator", x.label},
                 {"pairing", x.pairing},
                 {"kernel_residual", x.kernel_residual},
                 {"induced_sigma", quat_to_json(x.induced_sigma)}});
  return {{"entries", e}, {"max_abs_pairing", c.max_abs_pairing}, {"argmax", c.argmax}};
}

json envelope(const std::string& command, const json& input, const json& result, bool pass) {
  json j;
  j["tool"] = "ymw";
  j["version"] = version();
  j["command"] = command;
  j["conventions_fingerprint"] = conventions_fingerprint();
  j["input"] = input;
  j["result"] = result;
  j["pass"] = pass;
  return j;
}

std::string render(const json& j) { return j.dump(2) + "\n"; }

}  // namespace ymw
