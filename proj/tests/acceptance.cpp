// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ymw/adhm.hpp"
#include "ymw/cylmodes.hpp"
#include "ymw/obstruction.hpp"
#include "ymw/quadrature.hpp"
#include "ymw/report.hpp"
#include "ymw/rng.hpp"
#include "ymw/standard.hpp"

using namespace ymw;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  json report;
  bool pass = false;
  std::string summary;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double rel_dist(const TwoFormD& a, const TwoFormD& b) { return std::sqrt(norm2(a - b) / norm2(b)); }

AdhmData two_instanton() {
  AdhmData d{QMatrix(2, 2), QMatrix(1, 2)};
  d.B(1, 1) = Quat(1);
  d.lambda(0, 0) = Quat(1);
  d.lambda(0, 1) = Quat(1);
  return d;
}

Outcome asd_exactness() {
  const GaugeField conn = inverted_connection(unit_adhm(1.0));
  CounterRng rng(2024, 1);
  double worst = 0.0;
  for (int n = 0; n < 200; ++n) worst = std::max(worst, std::sqrt(norm2(sd_part(curvature(conn, rng.in_ball(3.0))))));
  return {{{"points", 200}, {"radius", 3.0}, {"max_F_plus", worst}}, worst <= 1e-8, fmt("max|F+| = %.2e", worst)};
}

Outcome energy() {
  const GaugeField conn = inverted_connection(unit_adhm(1.0));
  const EnergyReport e = energy_report(conn, ball_grid(40.0, 32));
  const double target = 4.0 * kPi * kPi;
  const double rel = std::abs(e.ym - target) / target;
  const double cw = std::abs(e.ym - e.norm_plus2 - target * e.chern) / target;
  json j = to_json(e);
  j["target"] = target;
  j["relative_error"] = rel;
  j["chern_weil_relative_gap"] = cw;
  return {j, rel <= 0.01 && cw <= 0.01, fmt("YM = %.6f (rel %.1e), Chern-Weil gap %.1e", e.ym, rel, cw)};
}

Outcome curvature_zero() {
  json cases = json::array();
  bool ok = true;
  double worst = 0.0;
  for (const auto& [label, d] : {std::pair<const char*, AdhmData>{"kappa1", unit_adhm(1.0)}, {"kappa2", two_instanton()}}) {
    const TwoFormD closed = curvature_at_zero(d);
    // Values only, so the curvature comes from finite differences.
    const GaugeField analytic = inverted_connection(d);
    const GaugeField sampled([analytic](const Point& x) { return analytic(x); });
    const double r = rel_dist(curvature(sampled, Point::Zero()), closed);
    worst = std::max(worst, r);
    ok = ok && r <= 1e-6;
    cases.push_back({{"case", label}, {"relative_gap", r}, {"closed_form", to_json(closed)}});
  }
  const StandardCheck s = is_standard(coefficients(curvature_at_zero(unit_adhm(1.0)), Duality::anti_self_dual));
  ok = ok && s.standard && std::abs(s.scale - 2.0) <= 1e-12;
  return {{{"cases", cases}, {"kappa1_scale", s.scale}, {"kappa1_deviation", s.deviation}},
          ok,
          fmt("max relative gap %.1e, kappa=1 scale %.12g", worst, s.scale)};
}

Outcome stokes() {
  json runs = json::array();
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CounterRng rng(seed);
    CounterRng ra = rng.split(0), rb = rng.split(1);
    const StokesReport s = stokes_check(PolynomialField::random(ra, 3).field(), PolynomialField::random(rb, 3).field(),
                                        0.5, 1.0, 48);
    worst = std::max(worst, s.residual);
    json j = to_json(s);
    j["seed"] = seed;
    runs.push_back(j);
  }
  return {{{"runs", runs}, {"max_residual", worst}}, worst <= 1e-4, fmt("20 seeds, max residual %.1e", worst)};
}

Outcome eigenmodes() {
  json frames = json::array();
  double worst = 0.0;
  for (FrameSide s : {FrameSide::left, FrameSide::right})
    for (int a = 0; a < 3; ++a) {
      const double r = eigen_residual(s, a);
      worst = std::max(worst, r);
      frames.push_back({{"frame", frame_side_name(s)}, {"index", a}, {"eigenvalue", frame_eigenvalue(s)}, {"residual", r}});
    }
  const bool signs = frame_eigenvalue(FrameSide::left) == -2.0 && frame_eigenvalue(FrameSide::right) == 2.0;
  return {{{"frames", frames}, {"max_residual", worst}}, signs && worst <= 1e-6, fmt("max residual %.1e", worst)};
}

Outcome comparison() {
  const ModeSystem sys = ModeSystem::standard();
  double worst = -INFINITY, after = 0.0;
  bool ok = true;
  json rows = json::array();
  for (int k = 0; k < 100; ++k) {
    CounterRng rng(7, 100 + static_cast<std::uint64_t>(k));
    const ModeForcing beta = random_mode_forcing(sys, rng, k % 2 == 1);
    Eigen::VectorXd bc(sys.size());
    for (int i = 0; i < sys.size(); ++i) bc(i) = rng.normal();
    const ModeTrajectory tr = integrate_mode_system(sys, beta, 3.0, bc);
    const ComparisonReport r = check_comparison(sys, tr, beta, 2, 0.0, 1e-6);
    ok = ok && r.pass;
    worst = std::max({worst, r.violation_a, r.violation_b_minus, r.violation_b_plus, r.violation_b_plus_stated});
    after = std::max(after, r.stated_violation_after_t0);
    rows.push_back(to_json(r));
  }
  return {{{"forcings", 100}, {"max_violation", worst}, {"max_stated_violation_after_t0", after}, {"reports", rows}},
          ok,
          fmt("100 forcings, max violation %.1e (growing-mode printed kernel beyond t0: %.1e)", worst, after)};
}

Outcome neck() {
  json fits = json::array();
  bool ok = true;
  std::string summary;
  for (double lambda : {0.05, 0.1}) {
    NeckOptions opt;
    opt.standard_tol = 1e-3;
    const NeckFit f = fit_instanton_neck(unit_adhm(1.0 / lambda), lambda, 1.0, geometric_radii(3.0 * lambda, 0.5, 10),
                                         Duality::anti_self_dual, opt);
    const double ratio = f.c_coef.norm() / (lambda * lambda * f.d_coef.norm());
    ok = ok && ratio <= 1e-3 && f.is_standard_d && f.slope <= -4.5;
    json j = to_json(f);
    j["c_ratio"] = ratio;
    fits.push_back(j);
    summary += fmt("lambda %.2f: |c|/(l^2|d|) %.1e slope %.2f; ", lambda, ratio, f.slope);
  }
  summary.resize(summary.size() - 2);
  return {{{"fits", fits}}, ok, summary};
}

Outcome boundary_constant() {
  // x^nu dx^mu (x) q with the pair (nu, mu) and leg q pairing against xi = sum_a e_a (x) q_a.
  struct Mono {
    int nu, mu, leg;
  };
  const Mono monos[] = {{0, 1, 1}, {1, 0, 1}, {0, 2, 2}, {2, 0, 2}, {0, 3, 3},
                        {1, 2, 3}, {2, 1, 3}, {1, 3, 2}, {2, 3, 1}, {3, 2, 1}};
  const TwoFormD xi = from_coefficients(Eigen::Matrix3d::Identity().eval(), Duality::anti_self_dual);
  CounterRng rng(8);
  json rows = json::array();
  double worst = 0.0;
  for (const Mono& m : monos) {
    PolynomialField p;
    std::array<int, 4> e{0, 0, 0, 0};
    e[m.nu] = 1;
    p.add_term(m.mu, Quat::basis(m.leg), e, 1.0 + rng.uniform());
    std::array<int, 4> c{0, 0, 0, 0};
    for (int k = 0; k < 3; ++k) ++c[static_cast<int>(rng.uniform() * 4)];
    p.add_term(static_cast<int>(rng.uniform() * 4), rng.imag_quat(), c);
    const PairingReport r = boundary_limit(xi, p.field(), {0.04, 0.02, 0.01}, 32);
    worst = std::max(worst, r.relative_gap);
    json j = to_json(r);
    j["monomial"] = {m.nu, m.mu, m.leg};
    rows.push_back(j);
  }
  return {{{"fields", rows}, {"max_gap", worst}}, worst <= 1e-3, fmt("10 fields, max gap to (pi^2/2)<xi, D-a> %.1e", worst)};
}

Outcome catalog() {
  const GaugeField conn = inverted_connection(unit_adhm(1.0));
  const Point z = Point::Zero();
  const ProbeSet probes = probe_points(z, 1.0, 50, 1);
  const TwoFormD f0 = curvature(conn, z);
  const double nf = std::sqrt(norm2(f0));
  const auto gap = [&](const DeformationField& a, const TwoFormD& expected) {
    return std::sqrt(norm2(dminus(conn, a.a, z) - expected)) / std::max(std::sqrt(norm2(expected)), 1e-12 * nf);
  };
  json rows = json::array();
  bool ok = true;
  double worst_kernel = 0.0;
  const auto add = [&](const DeformationField& a, double g, double tol) {
    ok = ok && g <= tol && a.kernel_residual <= 1e-4;
    worst_kernel = std::max(worst_kernel, a.kernel_residual);
    rows.push_back({{"generator", a.label}, {"identity_gap", g}, {"tol", tol}, {"kernel_residual", a.kernel_residual},
                    {"induced_sigma", quat_to_json(a.induced_sigma)}});
  };
  const DeformationField s = scaling_deformation(conn, z, probes);
  add(s, gap(s, 2.0 * f0), 1e-3);
  for (int k = 0; k < 3; ++k) {
    const DeformationField r = rotation_deformation(conn, z, asd_rotation(k), probes);
    add(r, gap(r, ad(r.induced_sigma, asd_part(f0))), 1e-3);
  }
  for (const Quat& xi : {Quat(0, 1, 0, 0), Quat(0, 0.3, -0.7, 0.2)}) {
    const DeformationField g = gauge_deformation(conn, xi, probes);
    TwoFormD e;
    const TwoFormD fm = asd_part(f0);
    for (int p = 0; p < 6; ++p) e[p] = commutator(fm[p], xi);
    add(g, gap(g, e), 1e-4);
  }
  return {{{"entries", rows}}, ok, fmt("%.0f deformations, max probe |D+a| %.1e", static_cast<double>(rows.size()), worst_kernel)};
}

Outcome lemma65() {
  CounterRng rng(65);
  double lo = INFINITY;
  for (int i = 0; i < 10000; ++i) {
    const StandardTensor a = random_standard(rng), b = random_standard(rng);
    lo = std::min(lo, lemma65_oracle(a, b));
  }
  CounterRng rng2(66);
  int bad = 0;
  for (int i = 0; i < 100000; ++i) {
    const double t = std::abs(random_symmetric_orthogonal(rng2).trace());
    if (std::min(std::abs(t - 1.0), std::abs(t - 3.0)) > 1e-9) ++bad;
  }
  return {{{"pairs", 10000}, {"min_normalized_value", lo}, {"orthogonal_samples", 100000}, {"trace_failures", bad}},
          lo > 0.0 && bad == 0,
          fmt("min normalized value %.4f, trace failures %.0f", lo, bad)};
}

Outcome deformation() {
  const AdhmData d = two_instanton();
  DeformOptions opt;
  opt.steps = 20;
  const auto path = deform(d, last_entry_path(d.lambda, Quat(0, 1, 0, 0)), opt);
  const double h = opt.t_end / opt.steps;
  double lip = 0.0, worst = 0.0, ratio = 0.0;
  for (const auto& s : path) {
    lip = std::max(lip, s.velocity);
    worst = std::max(worst, s.residual);
  }
  json steps = json::array();
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0) ratio = std::max(ratio, path[i].step_norm / (h * lip));
    steps.push_back(to_json(path[i]));
  }
  const AdhmValidation fin = validate(path.back().data);
  const bool ok = path.size() == 21 && worst <= 1e-10 && fin.pass && ratio <= 3.0;
  return {{{"steps", steps}, {"max_residual", worst}, {"lipschitz_estimate", lip}, {"max_step_ratio", ratio},
           {"final_validation", to_json(fin)}},
          ok,
          fmt("max residual %.1e, max step / (h L) %.3f, A1 re-validates", worst, ratio)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ymw acceptance run"};
  std::string report_dir;
  bool skip_repeat = false;
  app.add_option("--report-dir", report_dir, "write one JSON report per criterion here");
  app.add_flag("--skip-repeat", skip_repeat, "do not rerun criteria 1-11 for the determinism check");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "asd_exactness", 5, asd_exactness},   {2, "energy", 60, energy},
      {3, "curvature_at_zero", 5, curvature_zero}, {4, "stokes", 30, stokes},
      {5, "eigenmodes", 10, eigenmodes},       {6, "comparison", 60, comparison},
      {7, "neck_fit", 60, neck},               {8, "boundary_constant", 30, boundary_constant},
      {9, "deformation_catalog", 60, catalog}, {10, "pairing_oracle", 30, lemma65},
      {11, "deformation_solver", 30, deformation},
  };

  std::vector<std::string> rendered;
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {{{"error", e.what()}}, false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    const std::string text = render(envelope(std::string("acceptance/") + c.name, json::object(), o.report, o.pass));
    rendered.push_back(text);
    if (!report_dir.empty()) {
      std::filesystem::create_directories(report_dir);
      std::ofstream(std::filesystem::path(report_dir) / (std::to_string(c.id) + "_" + c.name + ".json")) << text;
    }
    std::printf("criterion %2d %-20s %s  %s  [%.2f s of %.0f s]\n", c.id, c.name, pass ? "PASS" : "FAIL",
                o.summary.c_str(), secs, c.budget_s);
    std::fflush(stdout);
  }

  if (skip_repeat) {
    std::printf("criterion 12 %-20s SKIP\n", "determinism");
  } else {
    int differing = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
      Outcome o;
      try {
        o = criteria[i].run();
      } catch (const std::exception& e) {
        o = {{{"error", e.what()}}, false, ""};
      }
      const std::string text =
          render(envelope(std::string("acceptance/") + criteria[i].name, json::object(), o.report, o.pass));
      if (text != rendered[i]) ++differing;
    }
    const bool pass = differing == 0;
    if (!pass) ++failures;
    std::printf("criterion 12 %-20s %s  %d of 11 reports differ byte-wise on rerun\n", "determinism",
                pass ? "PASS" : "FAIL", differing);
  }
  return failures == 0 ? 0 : 1;
}
