#include "ymw/cli.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ymw/adhm.hpp"
#include "ymw/cylmodes.hpp"
#include "ymw/errors.hpp"
#include "ymw/obstruction.hpp"
#include "ymw/quadrature.hpp"
#include "ymw/report.hpp"
#include "ymw/rng.hpp"
#include "ymw/standard.hpp"

namespace ymw {

namespace {

using nlohmann::json;

struct Flags {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 7;
  std::optional<int> order;
  std::optional<double> tol;
  std::string format = "json";
  bool quiet = false;
};

// Config accessor that records which keys a command understands.
class Config {
 public:
  Config(json j, std::filesystem::path base) : j_(std::move(j)), base_(std::move(base)) {
    if (!j_.is_object()) throw ConfigError("config must be a JSON object");
  }

  void allow(std::initializer_list<const char*> keys) { allowed_.insert(keys.begin(), keys.end()); }
  void check_keys() const {
    for (const auto& [k, _] : j_.items())
      if (!allowed_.count(k)) throw ConfigError("unknown config key: " + k);
  }
  bool has(const char* k) const { return j_.contains(k); }
  const json& raw() const { return j_; }
  const json& at(const char* k) const { return j_.at(k); }
  const std::filesystem::path& base() const { return base_; }

  double number(const char* k, double def) const {
    if (!j_.contains(k)) return def;
    if (!j_[k].is_number()) throw ConfigError(std::string("config key must be a number: ") + k);
    return j_[k].get<double>();
  }
  int integer(const char* k, int def) const {
    if (!j_.contains(k)) return def;
    if (!j_[k].is_number_integer()) throw ConfigError(std::string("config key must be an integer: ") + k);
    return j_[k].get<int>();
  }
  bool boolean(const char* k, bool def) const {
    if (!j_.contains(k)) return def;
    if (!j_[k].is_boolean()) throw ConfigError(std::string("config key must be a boolean: ") + k);
    return j_[k].get<bool>();
  }
  std::string string(const char* k, const std::string& def) const {
    if (!j_.contains(k)) return def;
    if (!j_[k].is_string()) throw ConfigError(std::string("config key must be a string: ") + k);
    return j_[k].get<std::string>();
  }
  std::vector<double> numbers(const char* k, const std::vector<double>& def) const {
    if (!j_.contains(k)) return def;
    if (!j_[k].is_array()) throw ConfigError(std::string("config key must be an array: ") + k);
    std::vector<double> v;
    for (const auto& x : j_[k]) {
      if (!x.is_number()) throw ConfigError(std::string("config array must hold numbers: ") + k);
      v.push_back(x.get<double>());
    }
    return v;
  }
  Point point(const char* k) const {
    const auto v = numbers(k, {0, 0, 0, 0});
    if (v.size() != 4) throw ConfigError(std::string("config point must have 4 entries: ") + k);
    return {v[0], v[1], v[2], v[3]};
  }
  Quat quat(const char* k, const Quat& def) const { return j_.contains(k) ? quat_from_json(j_[k]) : def; }

 private:
  json j_;
  std::filesystem::path base_;
  std::set<std::string> allowed_;
};

json read_json_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in " + p.string() + ": " + e.what());
  }
}

// ADHM data from inline keys (kappa, B, lambda) or an "adhm" path/object.
std::optional<AdhmData> load_adhm(Config& cfg) {
  cfg.allow({"kappa", "B", "lambda", "adhm"});
  if (cfg.has("adhm")) {
    const json& a = cfg.at("adhm");
    if (a.is_string()) return adhm_from_json(read_json_file(cfg.base() / a.get<std::string>()));
    return adhm_from_json(a);
  }
  if (cfg.has("kappa") || cfg.has("B") || cfg.has("lambda")) {
    json sub;
    for (const char* k : {"kappa", "B", "lambda"})
      if (cfg.has(k)) sub[k] = cfg.at(k);
    return adhm_from_json(sub);
  }
  return std::nullopt;
}

AdhmData require_adhm(Config& cfg) {
  auto d = load_adhm(cfg);
  if (!d) throw ConfigError("this command needs ADHM data (kappa, B, lambda or adhm)");
  return *d;
}

GaugeField select_field(const AdhmData& d, const std::string& which) {
  if (which == "inverted") return inverted_connection(d);
  if (which == "direct") return connection(d);
  throw ConfigError("field must be \"inverted\" or \"direct\"");
}

struct Outcome {
  json input;
  json result;
  bool pass = false;
  std::string csv;  // filled when a CSV dump was requested
};

bool want_csv(const Flags& f) { return f.format == "csv"; }

Outcome cmd_validate(Config& cfg, const Flags& f) {
  cfg.allow({"grid_per_axis", "refine_starts", "rank_tol", "a1_tol"});
  const AdhmData d = require_adhm(cfg);
  cfg.check_keys();
  SweepOptions opt;
  opt.grid_per_axis = cfg.integer("grid_per_axis", opt.grid_per_axis);
  opt.refine_starts = cfg.integer("refine_starts", opt.refine_starts);
  opt.rank_tol = cfg.number("rank_tol", opt.rank_tol);
  opt.a1_tol = f.tol.value_or(cfg.number("a1_tol", opt.a1_tol));
  const AdhmValidation v = validate(d, opt);
  Outcome o;
  o.input = {{"adhm", adhm_to_json(d)}, {"a1_tol", opt.a1_tol}, {"rank_tol", opt.rank_tol}};
  o.result = to_json(v);
  o.pass = v.pass;
  return o;
}

Outcome cmd_field_eval(Config& cfg, const Flags& f) {
  cfg.allow({"field", "points", "samples", "radius"});
  const AdhmData d = require_adhm(cfg);
  cfg.check_keys();
  const std::string which = cfg.string("field", "inverted");
  const GaugeField conn = select_field(d, which);
  std::vector<Point> pts;
  if (cfg.has("points")) {
    for (const auto& p : cfg.at("points")) {
      if (!p.is_array() || p.size() != 4) throw ConfigError("points must be arrays of 4 numbers");
      pts.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>(), p[3].get<double>());
    }
  } else {
    CounterRng rng(f.seed, 1);
    const int n = cfg.integer("samples", 16);
    const double r = cfg.number("radius", 3.0);
    for (int i = 0; i < n; ++i) pts.push_back(rng.in_ball(r));
  }
  const double tol = f.tol.value_or(1e-8);
  Outcome o;
  o.input = {{"adhm", adhm_to_json(d)}, {"field", which}, {"tol", tol}};
  json samples = json::array();
  double worst = 0.0;
  for (const Point& x : pts) {
    const TwoFormD F = curvature(conn, x);
    const double p2 = norm2(sd_part(F)), m2 = norm2(asd_part(F));
    worst = std::max(worst, std::sqrt(which == "inverted" ? p2 : m2));
    samples.push_back({{"x", to_json(x)}, {"F", to_json(F)}, {"F2", norm2(F)}, {"Fplus2", p2}, {"Fminus2", m2}});
  }
  o.input["points"] = static_cast<int>(pts.size());
  o.result = {{"samples", samples}, {"max_wrong_duality_norm", worst}};
  o.pass = worst <= tol;
  if (want_csv(f)) {
    std::ostringstream os;
    write_field_csv(os, conn, pts);
    o.csv = os.str();
  }
  return o;
}

Outcome cmd_energy(Config& cfg, const Flags& f, bool chern_only) {
  cfg.allow({"field", "R", "order"});
  const AdhmData d = require_adhm(cfg);
  cfg.check_keys();
  const std::string which = cfg.string("field", "inverted");
  const double R = cfg.number("R", 40.0);
  const int order = f.order.value_or(cfg.integer("order", 32));
  const GaugeField conn = select_field(d, which);
  const EnergyReport e = energy_report(conn, ball_grid(R, order));
  const double target = 4.0 * std::numbers::pi * std::numbers::pi * d.kappa();
  Outcome o;
  o.input = {{"adhm", adhm_to_json(d)}, {"field", which}, {"R", R}, {"order", order}};
  o.result = to_json(e);
  if (chern_only) {
    const double tol = f.tol.value_or(0.01);
    o.input["tol"] = tol;
    o.result["nearest_integer"] = std::lround(e.chern);
    o.pass = e.integer_distance <= tol;
  } else {
    const double tol = f.tol.value_or(0.01);
    const double rel = std::abs(e.ym - target) / target;
    const double cw = e.chern_weil_gap / target;
    o.input["tol"] = tol;
    o.result["target"] = target;
    o.result["relative_error"] = rel;
    o.result["chern_weil_relative_gap"] = cw;
    o.pass = rel <= tol && cw <= tol;
  }
  return o;
}

Outcome cmd_stokes(Config& cfg, const Flags& f) {
  cfg.allow({"seeds", "r0", "r1", "order", "degree", "scale"});
  cfg.check_keys();
  const int seeds = cfg.integer("seeds", 1);
  const double r0 = cfg.number("r0", 0.5), r1 = cfg.number("r1", 1.0);
  const int order = f.order.value_or(cfg.integer("order", 48));
  const int degree = cfg.integer("degree", 3);
  const double scale = cfg.number("scale", 1.0);
  const double tol = f.tol.value_or(1e-4);
  Outcome o;
  o.input = {{"seed", f.seed}, {"seeds", seeds}, {"r0", r0}, {"r1", r1}, {"order", order},
             {"degree", degree}, {"scale", scale}, {"tol", tol}};
  json runs = json::array();
  double worst = 0.0;
  for (int s = 0; s < seeds; ++s) {
    CounterRng rng(f.seed + static_cast<std::uint64_t>(s));
    CounterRng ra = rng.split(0), rb = rng.split(1);
    const PolynomialField A = PolynomialField::random(ra, degree, scale);
    const PolynomialField a = PolynomialField::random(rb, degree, scale);
    const StokesReport rep = stokes_check(A.field(), a.field(), r0, r1, order);
    worst = std::max(worst, rep.residual);
    json j = to_json(rep);
    j["seed"] = f.seed + static_cast<std::uint64_t>(s);
    runs.push_back(j);
  }
  o.result = {{"runs", runs}, {"max_residual", worst}};
  o.pass = worst <= tol;
  return o;
}

Outcome cmd_modes(Config& cfg, const Flags& f) {
  cfg.allow({"T", "m", "t0", "forcings", "frame_order", "galerkin_degree", "forcing_scale"});
  cfg.check_keys();
  const double T = cfg.number("T", 3.0);
  const int m = cfg.integer("m", 2);
  const double t0 = cfg.number("t0", 0.0);
  const int nf = cfg.integer("forcings", 10);
  const int frame_order = f.order.value_or(cfg.integer("frame_order", 8));
  const int gdeg = cfg.integer("galerkin_degree", 1);
  const double fscale = cfg.number("forcing_scale", 1.0);
  const double tol = f.tol.value_or(1e-6);
  Outcome o;
  o.input = {{"seed", f.seed}, {"T", T}, {"m", m}, {"t0", t0}, {"forcings", nf}, {"frame_order", frame_order},
             {"galerkin_degree", gdeg}, {"forcing_scale", fscale}, {"tol", tol}};

  bool pass = true;
  json frames = json::array();
  for (FrameSide s : {FrameSide::left, FrameSide::right})
    for (int a = 0; a < 3; ++a) {
      const double r = eigen_residual(s, a, frame_order);
      pass = pass && r <= tol;
      frames.push_back({{"frame", frame_side_name(s)}, {"index", a}, {"eigenvalue", frame_eigenvalue(s)}, {"residual", r}});
    }
  o.result["frames"] = frames;
  o.result["theta_plus2_frame"] = frame_side_name(plus_frame());
  if (gdeg > 0) o.result["galerkin_spectrum"] = galerkin_spectrum(gdeg);

  const ModeSystem sys = ModeSystem::standard();
  json cmp = json::array();
  double worst = -INFINITY, stated_after = 0.0;
  for (int k = 0; k < nf; ++k) {
    CounterRng rng(f.seed, 100 + static_cast<std::uint64_t>(k));
    const ModeForcing beta = random_mode_forcing(sys, rng, k % 2 == 1, fscale);
    Eigen::VectorXd bc(sys.size());
    for (int i = 0; i < sys.size(); ++i) bc(i) = rng.normal();
    const ModeTrajectory tr = integrate_mode_system(sys, beta, T, bc);
    const ComparisonReport rep = check_comparison(sys, tr, beta, m, t0, tol);
    pass = pass && rep.pass;
    worst = std::max({worst, rep.violation_a, rep.violation_b_minus, rep.violation_b_plus, rep.violation_b_plus_stated});
    stated_after = std::max(stated_after, rep.stated_violation_after_t0);
    json j = to_json(rep);
    j["probe_error"] = tr.probe_error;
    cmp.push_back(j);
  }
  o.result["comparisons"] = cmp;
  o.result["max_violation"] = nf > 0 ? worst : 0.0;
  o.result["max_stated_violation_after_t0"] = stated_after;
  o.pass = pass;
  return o;
}

Outcome cmd_neck(Config& cfg, const Flags& f) {
  cfg.allow({"lambda", "radii", "radii_count", "r_min", "r_max", "r0", "dual", "order", "nuisance_terms", "c_terms",
             "slope_max", "c_tol", "standard_tol"});
  const auto given = load_adhm(cfg);
  cfg.check_keys();
  const double lambda = cfg.number("lambda", 0.1);
  const AdhmData d = given ? *given : unit_adhm(1.0 / lambda);
  std::vector<double> radii = cfg.numbers("radii", {});
  if (radii.empty())
    radii = geometric_radii(cfg.number("r_min", 3.0 * lambda), cfg.number("r_max", 0.5), cfg.integer("radii_count", 10));
  const double r0 = cfg.number("r0", 2.0 * *std::max_element(radii.begin(), radii.end()));
  const std::string dual_s = cfg.string("dual", "asd");
  if (dual_s != "asd" && dual_s != "sd") throw ConfigError("dual must be \"sd\" or \"asd\"");
  const Duality dual = dual_s == "sd" ? Duality::self_dual : Duality::anti_self_dual;
  NeckOptions opt;
  opt.order = f.order.value_or(cfg.integer("order", opt.order));
  opt.nuisance_terms = cfg.integer("nuisance_terms", opt.nuisance_terms);
  opt.c_terms = cfg.integer("c_terms", opt.c_terms);
  opt.standard_tol = f.tol.value_or(cfg.number("standard_tol", 1e-3));
  const double slope_max = cfg.number("slope_max", -4.5);
  const double c_tol = cfg.number("c_tol", 1e-3);

  const NeckFit fit = fit_instanton_neck(d, lambda, r0, radii, dual, opt);
  Outcome o;
  o.input = {{"adhm", adhm_to_json(d)}, {"lambda", lambda}, {"radii", radii}, {"r0", r0}, {"dual", dual_s},
             {"order", opt.order}, {"nuisance_terms", opt.nuisance_terms}, {"c_terms", opt.c_terms},
             {"standard_tol", opt.standard_tol}, {"slope_max", slope_max}, {"c_tol", c_tol}};
  o.result = to_json(fit);
  const double c_ratio = fit.d_coef.norm() > 0.0 ? fit.c_coef.norm() / (lambda * lambda * fit.d_coef.norm()) : 0.0;
  o.result["c_ratio"] = c_ratio;
  o.pass = fit.is_standard_d;
  if (dual == Duality::anti_self_dual) o.pass = o.pass && fit.slope <= slope_max && c_ratio <= c_tol;
  if (want_csv(f)) {
    std::ostringstream os;
    os.precision(17);
    os << "r,norm\n";
    for (const auto& r : fit.residuals) os << r.r << ',' << r.norm << '\n';
    o.csv = os.str();
  }
  return o;
}

Eigen::Matrix4d rotation_from_config(const json& j) {
  if (!j.is_object()) throw ConfigError("rotation must be an object");
  for (const auto& [k, _] : j.items())
    if (k != "type" && k != "index" && k != "plane") throw ConfigError("unknown rotation key: " + k);
  const std::string type = j.value("type", std::string("asd"));
  if (type == "plane") {
    if (!j.contains("plane") || !j["plane"].is_array() || j["plane"].size() != 2)
      throw ConfigError("plane rotation needs \"plane\": [mu, nu]");
    const int mu = j["plane"][0].get<int>(), nu = j["plane"][1].get<int>();
    if (mu < 0 || mu > 3 || nu < 0 || nu > 3 || mu == nu) throw ConfigError("plane indices must be distinct in 0..3");
    return plane_rotation(mu, nu);
  }
  const int a = j.value("index", 0);
  if (a < 0 || a > 2) throw ConfigError("rotation index must be in 0..2");
  if (type == "asd") return asd_rotation(a);
  if (type == "sd") return sd_rotation(a);
  throw ConfigError("rotation type must be sd, asd or plane");
}

Outcome cmd_obstruction(Config& cfg, const Flags& f) {
  cfg.allow({"generator", "rotation", "lift", "xi_gauge", "sigma", "z", "radii", "order", "probes", "probe_radius",
             "boundary", "xi"});
  const auto given = load_adhm(cfg);
  cfg.check_keys();
  const AdhmData d = given ? *given : unit_adhm(1.0);
  const GaugeField conn = inverted_connection(d);
  const std::string gen = cfg.string("generator", "scaling");
  const Point z = cfg.point("z");
  const std::vector<double> radii = cfg.numbers("radii", {0.04, 0.02, 0.01});
  const int order = f.order.value_or(cfg.integer("order", 48));
  const double tol = f.tol.value_or(1e-3);
  const ProbeSet probes = probe_points(z, cfg.number("probe_radius", 1.0), cfg.integer("probes", 50), f.seed);
  const TwoFormD Fz = curvature(conn, z);
  TwoFormD xi = asd_part(Fz);
  if (cfg.has("xi")) {
    const auto& jx = cfg.at("xi");
    if (!jx.is_array() || jx.size() != 3) throw ConfigError("xi must be a 3x3 coefficient matrix");
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m(r, c) = jx.at(r).at(c).get<double>();
    xi = from_coefficients(m, Duality::anti_self_dual);
  }

  Outcome o;
  o.input = {{"adhm", adhm_to_json(d)}, {"generator", gen}, {"z", to_json(z)}, {"radii", radii}, {"order", order},
             {"tol", tol}, {"seed", f.seed}, {"xi", to_json(xi)}};

  if (gen == "catalog") {
    const CatalogReport cat = deformation_catalog(conn, xi, z, probes);
    o.result = to_json(cat);
    bool ok = cat.max_abs_pairing > 0.0;
    for (const auto& e : cat.entries) ok = ok && e.kernel_residual <= 1e-4;
    o.pass = ok;
    return o;
  }

  DeformationField a;
  std::optional<TwoFormD> expected;
  if (gen == "scaling") {
    a = scaling_deformation(conn, z, probes);
    expected = 2.0 * Fz;
  } else if (gen == "rotation") {
    const Eigen::Matrix4d G = rotation_from_config(cfg.has("rotation") ? cfg.at("rotation") : json::object());
    const std::string lift = cfg.string("lift", "pullback");
    if (lift != "pullback" && lift != "horizontal") throw ConfigError("lift must be pullback or horizontal");
    a = rotation_deformation(conn, z, G, probes, lift == "pullback" ? RotationLift::pullback : RotationLift::horizontal);
    expected = ad(a.induced_sigma, asd_part(Fz));
    o.input["lift"] = lift;
  } else if (gen == "gauge") {
    const Quat g = cfg.quat("xi_gauge", Quat(0, 1, 0, 0));
    a = gauge_deformation(conn, g, probes);
    TwoFormD e;
    const TwoFormD fm = asd_part(Fz);
    for (int p = 0; p < 6; ++p) e[p] = commutator(fm[p], g);
    expected = e;
    o.input["xi_gauge"] = quat_to_json(g);
  } else if (gen == "adhm_path") {
    const Quat s = cfg.quat("sigma", Quat(0, 1, 0, 0));
    a = adhm_deformation(d, s, probes);
    o.input["sigma"] = quat_to_json(s);
  } else {
    throw ConfigError("generator must be scaling, rotation, gauge, adhm_path or catalog");
  }

  const TwoFormD dm = dminus(conn, a.a, z);
  o.result["generator"] = a.label;
  o.result["kernel_residual"] = a.kernel_residual;
  o.result["pairing"] = pairing(xi, conn, a.a, z);
  o.result["dminus_at_z"] = to_json(dm);
  o.result["induced_sigma"] = quat_to_json(a.induced_sigma);
  bool ok = a.kernel_residual <= 1e-4;
  if (expected) {
    const double scale = std::max(std::sqrt(norm2(*expected)), 1e-12);
    const double gap = std::sqrt(norm2(dm - *expected)) / scale;
    o.result["identity_gap"] = gap;
    ok = ok && gap <= tol;
  }
  if (cfg.boolean("boundary", true)) {
    const PairingReport pr = boundary_limit(xi, a.a, radii, order, z, conn);
    o.result["boundary_extrapolation"] = pr.extrapolated_limit;
    o.result["pi2_over_2_gap"] = pr.relative_gap;
    o.result["boundary"] = to_json(pr);
    ok = ok && pr.relative_gap <= tol;
  }
  o.pass = ok;
  return o;
}

Outcome cmd_deform(Config& cfg, const Flags& f) {
  cfg.allow({"sigma", "steps", "t_end", "tol"});
  const auto given = load_adhm(cfg);
  cfg.check_keys();
  AdhmData d;
  if (given) {
    d = *given;
  } else {
    d = AdhmData{QMatrix(2, 2), QMatrix(1, 2)};
    d.B(1, 1) = Quat(1);
    d.lambda(0, 0) = Quat(1);
    d.lambda(0, 1) = Quat(1);
  }
  const Quat sigma = cfg.quat("sigma", Quat(0, 1, 0, 0));
  DeformOptions opt;
  opt.steps = cfg.integer("steps", opt.steps);
  opt.t_end = cfg.number("t_end", opt.t_end);
  const double tol = f.tol.value_or(cfg.number("tol", 1e-10));
  const auto path = deform(d, last_entry_path(d.lambda, sigma), opt);

  const double h = opt.t_end / opt.steps;
  double lip = 0.0, worst = 0.0;
  for (const auto& s : path) {
    lip = std::max(lip, s.velocity);
    worst = std::max(worst, s.residual);
  }
  bool steps_ok = true;
  json steps = json::array();
  for (std::size_t i = 0; i < path.size(); ++i) {
    json j = to_json(path[i]);
    const bool ok = i == 0 || path[i].step_norm <= 3.0 * h * lip;
    j["step_bound_ok"] = ok;
    steps_ok = steps_ok && ok;
    steps.push_back(j);
  }
  const AdhmValidation fin = validate(path.back().data);
  Outcome o;
  o.input = {{"adhm", adhm_to_json(d)}, {"sigma", quat_to_json(sigma)}, {"steps", opt.steps}, {"t_end", opt.t_end},
             {"tol", tol}};
  o.result = {{"steps", steps},
              {"max_residual", worst},
              {"lipschitz_estimate", lip},
              {"final_validation", to_json(fin)}};
  o.pass = worst <= tol && fin.pass && steps_ok;
  if (want_csv(f)) {
    std::ostringstream os;
    os.precision(17);
    os << "t,residual,min_sv,velocity,step_norm,newton_iterations\n";
    for (const auto& s : path)
      os << s.t << ',' << s.residual << ',' << s.min_sv << ',' << s.velocity << ',' << s.step_norm << ','
         << s.newton_iterations << '\n';
    o.csv = os.str();
  }
  return o;
}

Outcome cmd_lemma65(Config& cfg, const Flags& f) {
  cfg.allow({"pairs", "orthogonal_samples"});
  cfg.check_keys();
  const int pairs = cfg.integer("pairs", 10000);
  const int samples = cfg.integer("orthogonal_samples", 100000);
  const double tol = f.tol.value_or(1e-9);
  CounterRng rng(f.seed, 65);
  double lo = INFINITY;
  for (int i = 0; i < pairs; ++i) {
    const StandardTensor a = random_standard(rng), b = random_standard(rng);
    lo = std::min(lo, lemma65_oracle(a, b));
  }
  CounterRng rng2(f.seed, 66);
  int bad = 0;
  for (int i = 0; i < samples; ++i) {
    const Eigen::Matrix3d s = random_symmetric_orthogonal(rng2);
    const double t = std::abs(s.trace());
    if (std::min(std::abs(t - 1.0), std::abs(t - 3.0)) > tol) ++bad;
  }
  Outcome o;
  o.input = {{"seed", f.seed}, {"pairs", pairs}, {"orthogonal_samples", samples}, {"tol", tol}};
  o.result = {{"min_normalized_value", pairs > 0 ? lo : 0.0}, {"trace_failures", bad}};
  o.pass = (pairs == 0 || lo > 0.0) && bad == 0;
  return o;
}

Outcome cmd_conventions(Config& cfg, const Flags&) {
  cfg.check_keys();
  Outcome o;
  o.input = json::object();
  o.result = {{"conventions", conventions()}, {"fingerprint", conventions_fingerprint()}};
  o.pass = true;
  return o;
}

const std::map<std::string, std::string>& command_help() {
  static const std::map<std::string, std::string> m = {
      {"validate-adhm", "check the ADHM conditions on a data file"},
      {"field-eval", "evaluate curvature samples of an ADHM field"},
      {"energy", "Yang-Mills energy and Chern-Weil identity on a ball"},
      {"chern", "Chern number on a ball"},
      {"stokes", "boundary identity for random cubic fields"},
      {"modes", "sphere eigenframes and cylinder comparison estimates"},
      {"neck-fit", "fit neck coefficients of a rescaled instanton"},
      {"obstruction", "deformation catalog, pairing and boundary limit"},
      {"deform", "continuation of ADHM data along a lambda path"},
      {"oracle-lemma65", "random standard-tensor pairing oracle"},
      {"conventions", "print basis conventions and their fingerprint"},
  };
  return m;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"ymw: instanton, neck and obstruction computations"};
  app.name("ymw");
  app.fallthrough();
  app.require_subcommand(1, 1);
  Flags flags;
  app.add_option("--config", flags.config_path, "experiment config (JSON)");
  app.add_option("--out", flags.out_path, "write the report here instead of stdout");
  app.add_option("--seed", flags.seed, "RNG seed");
  app.add_option("--order", flags.order, "quadrature order");
  app.add_option("--tol", flags.tol, "check tolerance");
  app.add_option("--format", flags.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--quiet", flags.quiet, "no output on stdout");
  for (const auto& [name, help] : command_help()) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  Outcome o;
  try {
    json cj = json::object();
    std::filesystem::path base = ".";
    if (!flags.config_path.empty()) {
      cj = read_json_file(flags.config_path);
      base = std::filesystem::path(flags.config_path).parent_path();
    }
    Config cfg(cj, base);
    if (want_csv(flags) && command != "field-eval" && command != "neck-fit" && command != "deform")
      throw ConfigError("--format csv is available for field-eval, neck-fit and deform");
    try {
      if (command == "validate-adhm") o = cmd_validate(cfg, flags);
      else if (command == "field-eval") o = cmd_field_eval(cfg, flags);
      else if (command == "energy") o = cmd_energy(cfg, flags, false);
      else if (command == "chern") o = cmd_energy(cfg, flags, true);
      else if (command == "stokes") o = cmd_stokes(cfg, flags);
      else if (command == "modes") o = cmd_modes(cfg, flags);
      else if (command == "neck-fit") o = cmd_neck(cfg, flags);
      else if (command == "obstruction") o = cmd_obstruction(cfg, flags);
      else if (command == "deform") o = cmd_deform(cfg, flags);
      else if (command == "oracle-lemma65") o = cmd_lemma65(cfg, flags);
      else o = cmd_conventions(cfg, flags);
    } catch (const ConfigError&) {
      throw;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("bad config value: ") + e.what());
    } catch (const Error& e) {
      o.input = cj;
      o.result = {{"error", e.what()}};
      o.pass = false;
    }
  } catch (const std::exception& e) {
    err << "ymw " << command << ": " << e.what() << "\n";
    return 2;
  }

  const std::string text = o.csv.empty() ? render(envelope(command, o.input, o.result, o.pass)) : o.csv;
  if (!flags.out_path.empty()) {
    std::ofstream f(flags.out_path, std::ios::binary);
    if (!f) {
      err << "ymw: cannot write " << flags.out_path << "\n";
      return 2;
    }
    f << text;
  } else if (!flags.quiet) {
    out << text;
  }
  return o.pass ? 0 : 1;
}

}  // namespace ymw
