// Command-line front end for the gap-probability library.
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <locale>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "besselgap/besselgap.hpp"

using namespace besselgap;
using json = nlohmann::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_verify = 2;
constexpr int exit_internal = 3;

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct run_config {
  std::vector<double> nu{0.0};
  int nodes = 40;
  std::string out;
  std::string format = "csv";
  double ray_angle = 3.0 * pi / 4.0;
  double arc_radius = 1.5;
  double trunc_radius = 0.0;
  double tol = 1e-8;
  bool jacobi = false;

  std::vector<std::string> intervals;
  std::vector<double> times;
  std::vector<double> ends;
  std::string route = "split";
  int rule_budget = 48;

  double amax = 20.0;
  int steps = 100;

  double amin = 0.25;
  double awin = 4.0;
  int grid = 1001;
  bool full_system = false;
  std::string form = "compatible";
};

std::string num(double v) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << std::setprecision(17) << v;
  return s.str();
}

interval_set parse_intervals(const std::vector<std::string>& specs) {
  std::vector<std::pair<double, double>> iv;
  for (const auto& s : specs) {
    const auto c = s.find(':');
    if (c == std::string::npos) throw usage_error("interval must be lo:hi, got '" + s + "'");
    double lo, hi;
    try {
      std::size_t p1, p2;
      lo = std::stod(s.substr(0, c), &p1);
      hi = std::stod(s.substr(c + 1), &p2);
      if (p1 != c || p2 != s.size() - c - 1) throw std::invalid_argument(s);
    } catch (const std::logic_error&) {
      throw usage_error("cannot parse interval '" + s + "'");
    }
    if (lo == hi) continue;  // lo:lo is empty
    iv.emplace_back(lo, hi);
  }
  return interval_set(iv);
}

contour_geometry geometry(const run_config& c) {
  contour_geometry g;
  g.ray_angle = c.ray_angle;
  g.arc_radius = c.arc_radius;
  g.truncation_radius = c.trunc_radius;
  return g;
}

json config_json(const std::string& command, const run_config& c) {
  return {{"command", command}, {"nu", c.nu},           {"nodes", c.nodes},         {"format", c.format},
          {"ray_angle", c.ray_angle}, {"arc_radius", c.arc_radius}, {"trunc_radius", c.trunc_radius},
          {"tol", c.tol},         {"intervals", c.intervals}, {"times", c.times},     {"ends", c.ends},
          {"route", c.route},     {"amax", c.amax},         {"steps", c.steps},         {"amin", c.amin},
          {"awin", c.awin},       {"grid", c.grid},         {"full_system", c.full_system}, {"form", c.form}};
}

// Tabular results plus pass/fail checks, written as CSV or JSON.
struct report {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
  json checks = json::array();
  bool failed = false;

  void check(const std::string& name, double nu, double value, double tol, bool pass, const std::string& note = "") {
    checks.push_back({{"name", name}, {"nu", nu}, {"value", value}, {"tolerance", tol}, {"pass", pass}, {"note", note}});
    failed = failed || !pass;
  }

  void write(std::ostream& os, const std::string& format, const json& config) const {
    if (format == "json") {
      json res = json::array();
      for (const auto& r : rows) {
        json o;
        for (std::size_t k = 0; k < columns.size(); ++k) o[columns[k]] = r[k];
        res.push_back(o);
      }
      os << json{{"config", config}, {"results", res}, {"checks", checks}}.dump(2) << "\n";
      return;
    }
    if (!rows.empty()) {
      for (std::size_t k = 0; k < columns.size(); ++k) os << (k ? "," : "") << columns[k];
      os << "\n";
      for (const auto& r : rows) {
        for (std::size_t k = 0; k < r.size(); ++k) {
          if (k) os << ",";
          if (r[k].is_number()) {
            os << num(r[k].get<double>());
          } else if (r[k].is_array()) {
            for (std::size_t q = 0; q < r[k].size(); ++q) os << (q ? " " : "") << num(r[k][q].get<double>());
          } else {
            os << r[k].get<std::string>();
          }
        }
        os << "\n";
      }
    }
    if (!checks.empty()) {
      if (!rows.empty()) os << "\n";
      os << "check,nu,value,tolerance,pass,note\n";
      for (const auto& c : checks)
        os << c["name"].get<std::string>() << "," << num(c["nu"].get<double>()) << "," << num(c["value"].get<double>())
           << "," << num(c["tolerance"].get<double>()) << "," << (c["pass"].get<bool>() ? "pass" : "FAIL") << ","
           << c["note"].get<std::string>() << "\n";
    }
  }
};

report cmd_gap1(const run_config& c) {
  const interval_set iset = parse_intervals(c.intervals);
  report r;
  r.columns = {"nu", "intervals", "det", "conv", "logderivs"};
  for (double nu : c.nu) {
    require_order(nu);
    real_options o;
    o.jacobi_at_zero = c.jacobi;
    o.tol = c.tol;
    const det_result d = iset.empty() ? det_result{1.0, 0.0, c.nodes} : det_real_single(nu, iset, c.nodes, o);
    std::vector<double> ld;
    for (std::size_t j = 0; j < iset.signed_endpoints().size(); ++j) ld.push_back(logderiv_endpoint(nu, iset, j, c.nodes).resolvent);
    std::string ivs;
    for (const auto& [lo, hi] : iset.intervals()) ivs += (ivs.empty() ? "" : " ") + num(lo) + ":" + num(hi);
    r.rows.push_back({nu, ivs, d.det, d.conv, ld});
  }
  return r;
}

report cmd_gapmt(const run_config& c) {
  const time_config tc(c.times, c.ends);
  multi_options o;
  o.rule_budget = c.rule_budget;
  if (c.route == "laguerre") o.route = multi_route::laguerre;
  else if (c.route != "split") throw usage_error("--route must be split or laguerre");
  report r;
  r.columns = {"nu", "times", "ends", "det", "conv"};
  for (double nu : c.nu) {
    const det_result d = det_real_multi(nu, tc, c.nodes, o);
    if (d.conv > c.tol) throw convergence_error("gapmt: node halving changed det by " + num(d.conv));
    r.rows.push_back({nu, c.times, c.ends, d.det, d.conv});
  }
  return r;
}

report cmd_sweep(const run_config& c) {
  if (!(c.amax > 0.0)) throw usage_error("--amax must be positive");
  if (c.steps < 2) throw usage_error("--steps must be at least 2");
  report r;
  r.columns = {"nu", "a", "det", "conv"};
  for (double nu : c.nu) {
    require_order(nu);
    real_options o;
    o.tol = c.tol;
    for (int k = 0; k <= c.steps; ++k) {
      const double a = c.amax * k / c.steps;
      const det_result d = k == 0 ? det_result{1.0, 0.0, c.nodes} : det_real_single(nu, interval_set({{0.0, a}}), c.nodes, o);
      r.rows.push_back({nu, a, d.det, d.conv});
    }
  }
  return r;
}

report cmd_piii_verify(const run_config& c) {
  if (!(c.amin > 0.0 && c.awin > c.amin)) throw usage_error("need 0 < --amin < --amax");
  const double x0 = std::sqrt(c.amin), x1 = std::sqrt(c.awin);
  if (x0 < 0.2 || x1 > 4.0) throw usage_error("x window must lie within [0.2, 4]");
  const ode_form form = c.form == "printed" ? ode_form::printed : ode_form::compatible;
  if (c.form != "printed" && c.form != "compatible") throw usage_error("--form must be printed or compatible");
  report r;
  r.columns = {"nu", "x", "a", "F", "L", "tau", "det"};
  for (double nu : c.nu) {
    require_order(nu);
    tau_run run;
    try {
      run = tau_from_hamiltonian(nu, x0, x1, c.nodes, form, c.grid);
    } catch (const singularity_error& e) {
      r.check("tau_identity", nu, INFINITY, 1e-6, false, e.what());
      continue;
    }
    const auto& t = run.traj;
    for (std::size_t k = 0; k < t.x.size(); k += std::max<std::size_t>(1, t.x.size() / 50))
      r.rows.push_back({nu, t.x[k], t.x[k] * t.x[k], t.F[k], t.L[k], run.det_anchor_times_exp[k], run.det_direct[k]});
    r.check("tau_identity", nu, run.max_rel_error, 1e-6, run.max_rel_error < 1e-6);

    const double th = form == ode_form::compatible ? run.cal.state.theta0
                                                   : theta0_from_reduced(nu, x0, run.cal.state.F, run.cal.state.L, form);
    const auto res = piii_residual(t, nu, th, form);
    r.check("piii_residual", nu, res.max_residual, 1e-5, res.max_residual < 1e-5,
            std::to_string(res.excluded) + " points excluded near F = 0");

    const double dnu = std::fabs(th + nu), d2nu = std::fabs(th + 2.0 * nu);
    const std::string which = dnu < 1e-6 && d2nu < 1e-6 ? "both (nu = 0)" : dnu < 1e-6 ? "-nu" : d2nu < 1e-6 ? "-2nu" : "neither";
    r.check("theta0_convention", nu, th, 1e-6, std::min(dnu, d2nu) < 1e-6,
            "theta0 = " + num(th) + " vs -nu = " + num(0.0 - nu) + " and -2nu = " + num(0.0 - 2.0 * nu) + ": matches " + which +
                (run.cal.ambiguous ? "; calibration ambiguous" : ""));

    if (c.full_system && run.cal.state.L != 0.0) {
      const full_vars v0 = full_from_reduced(x0, run.cal.state.F, run.cal.state.L, nu, th);
      double drift = 0.0, dev = 0.0;
      try {
        const full_trajectory ft = integrate_full(nu, x0, v0, t.x, form);
        for (std::size_t k = 0; k < t.x.size(); ++k) {
          const auto& v = ft.v[k];
          drift = std::max(drift, std::fabs(2.0 * theta0_half(t.x[k], v, nu) - th));
          dev = std::max({dev, std::fabs(-v[3] / (v[2] * v[0]) - t.F[k]), std::fabs(v[0] - t.L[k])});
        }
      } catch (const singularity_error&) {
        drift = dev = INFINITY;
      }
      r.check("constant_of_motion_drift", nu, drift, 1e-8, drift < 1e-8);
      r.check("full_vs_reduced", nu, dev, 1e-7, dev < 1e-7);
    }
  }
  return r;
}

report cmd_iiks_check(const run_config& c) {
  const interval_set iset = parse_intervals(c.intervals.empty() ? std::vector<std::string>{"0.5:2"} : c.intervals);
  const contour_geometry geo = geometry(c);
  report r;
  r.columns = {"nu", "kind", "contour", "real_axis", "imag"};
  for (double nu : c.nu) {
    require_order(nu);
    const cplx dc = det_contour_single(nu, iset, geo);
    const double dr = det_real_single_value(nu, iset, c.nodes);
    r.rows.push_back({nu, "single", dc.real(), dr, dc.imag()});
    r.check("single_identity", nu, std::fabs(dc.real() - dr), 1e-6, std::fabs(dc.real() - dr) < 1e-6);
    r.check("single_imag", nu, std::fabs(dc.imag()), 1e-8, std::fabs(dc.imag()) < 1e-8);
    contour_geometry a = geo, b = geo;
    a.ray_angle = 2.2;
    b.ray_angle = 2.7;
    const double dd = std::abs(det_contour_single(nu, iset, a) - det_contour_single(nu, iset, b));
    r.check("ray_angle_deformation", nu, dd, 1e-7, dd < 1e-7);

    if (!c.times.empty()) {
      const time_config tc(c.times, c.ends);
      if (tc.size() > 3) throw usage_error("iiks-check supports at most three times");
      multi_contour_options mo;
      mo.geometry = geo;
      const cplx mc = det_contour_multi(nu, tc, mo);
      const double mr = det_real_multi(nu, tc, c.nodes).det;
      r.rows.push_back({nu, "multi", mc.real(), mr, mc.imag()});
      r.check("multi_identity", nu, std::fabs(mc.real() - mr), 1e-5, std::fabs(mc.real() - mr) < 1e-5);
      r.check("multi_imag", nu, std::fabs(mc.imag()), 1e-8, std::fabs(mc.imag()) < 1e-8);
    }
  }
  return r;
}

void add_common(CLI::App* s, run_config& c) {
  s->add_option("--nu", c.nu, "Bessel order(s), comma separated")->delimiter(',')->capture_default_str();
  s->add_option("--nodes", c.nodes, "Quadrature nodes per interval")->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--out", c.out, "Output file (default stdout)");
  s->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  s->add_option("--tol", c.tol, "Convergence tolerance on node halving")->capture_default_str();
}

void add_geometry(CLI::App* s, run_config& c) {
  s->add_option("--ray-angle", c.ray_angle, "Contour ray angle in (pi/2, pi)")->capture_default_str();
  s->add_option("--arc-radius", c.arc_radius, "Contour arc radius")->capture_default_str();
  s->add_option("--trunc-radius", c.trunc_radius, "Contour truncation radius (0 = automatic)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gap probabilities of the hard-edge Bessel process"};
  app.set_config("--config", "", "TOML/INI config file; command-line flags take precedence");
  app.require_subcommand(1);
  bool dump_config = false;
  app.add_flag("--dump-config", dump_config, "Print the effective configuration as a config file and exit")->configurable(false);
  run_config c;

  auto* gap1 = app.add_subcommand("gap1", "Single-time determinant on a union of intervals");
  add_common(gap1, c);
  gap1->add_option("--interval", c.intervals, "Interval lo:hi (repeatable; 0:0 is empty)")->required();
  gap1->add_flag("--jacobi", c.jacobi, "Gauss-Jacobi panel at the origin");

  auto* gapmt = app.add_subcommand("gapmt", "Multi-time determinant with intervals [0, a_k]");
  add_common(gapmt, c);
  gapmt->add_option("--times", c.times, "Strictly increasing times")->delimiter(',')->required();
  gapmt->add_option("--ends", c.ends, "Right endpoints a_k")->delimiter(',')->required();
  gapmt->add_option("--route", c.route, "Upper-block route: split or laguerre")->capture_default_str();
  gapmt->add_option("--rule-budget", c.rule_budget, "Nodes of the inner u-integral rule")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "det on [0, a] over a uniform a-grid");
  add_common(sweep, c);
  sweep->add_option("--amax", c.amax, "Largest a")->capture_default_str();
  sweep->add_option("--steps", c.steps, "Number of grid steps")->capture_default_str();

  auto* piii = app.add_subcommand("piii-verify", "Painleve III and tau-function checks");
  add_common(piii, c);
  piii->add_option("--amin", c.amin, "Anchor a = x0^2")->capture_default_str();
  piii->add_option("--amax", c.awin, "End of the a window")->capture_default_str();
  piii->add_option("--grid", c.grid, "Trajectory grid points")->capture_default_str();
  piii->add_option("--form", c.form, "ODE system: compatible or printed")->capture_default_str();
  piii->add_flag("--full-system", c.full_system, "Also integrate the (L, T, W, Y) system");

  auto* iiks = app.add_subcommand("iiks-check", "Contour determinant against the real-axis determinant");
  add_common(iiks, c);
  add_geometry(iiks, c);
  iiks->add_option("--interval", c.intervals, "Interval lo:hi (repeatable)");
  iiks->add_option("--times", c.times, "Times for the multi-time check")->delimiter(',');
  iiks->add_option("--ends", c.ends, "Endpoints for the multi-time check")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }
  if (dump_config) {
    std::cout << app.config_to_str(false, false);
    return exit_ok;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    report r;
    if (name == "gap1") r = cmd_gap1(c);
    else if (name == "gapmt") r = cmd_gapmt(c);
    else if (name == "sweep") r = cmd_sweep(c);
    else if (name == "piii-verify") r = cmd_piii_verify(c);
    else r = cmd_iiks_check(c);

    if (c.out.empty()) {
      r.write(std::cout, c.format, config_json(name, c));
    } else {
      std::ofstream f(c.out);
      if (!f) throw usage_error("cannot open " + c.out);
      r.write(f, c.format, config_json(name, c));
    }
    if (r.failed) {
      std::cerr << name << ": verification failed\n";
      return exit_verify;
    }
    return exit_ok;
  } catch (const usage_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return exit_usage;
  } catch (const besselgap::domain_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return exit_usage;
  } catch (const geometry_error& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return exit_usage;
  } catch (const convergence_error& e) {
    std::cerr << "convergence failure: " << e.what() << "\n";
    return exit_verify;
  } catch (const singularity_error& e) {
    std::cerr << "integration failure: " << e.what() << "\n";
    return exit_verify;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return exit_internal;
  }
}
