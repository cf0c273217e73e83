#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "config.hpp"
#include "fredholm.hpp"

namespace besselgap {

// printed: the original sign pattern, kept for comparison.
// compatible: the system obtained from the zero-curvature condition of the Lax pair.
enum class ode_form { printed, compatible };

struct painleve_state {
  double x = 0.0;
  double F = 0.0;
  double L = 0.0;
  double T = std::numeric_limits<double>::quiet_NaN();
  double W = std::numeric_limits<double>::quiet_NaN();
  double Y = std::numeric_limits<double>::quiet_NaN();
  double theta0 = std::numeric_limits<double>::quiet_NaN();
  double H = std::numeric_limits<double>::quiet_NaN();
};

using full_vars = std::array<double, 4>;     // L, T, W, Y
using reduced_vars = std::array<double, 2>;  // F, L

inline full_vars rhs_full(double x, const full_vars& v, double nu, ode_form form = ode_form::printed) {
  const auto [L, T, W, Y] = v;
  if (x == 0.0) throw singularity_error("rhs_full: x = 0");
  if (W == 0.0) throw singularity_error("rhs_full: W = 0");
  const double s = form == ode_form::printed ? 1.0 : -1.0;
  return {L / x + s * (2.0 * W * L * T / x + 2.0 * Y * L / (W * x) - Y / W),
          s * (L / W - x / (2.0 * W) + nu * T / x),
          s * (-2.0 * W * W * T / x + 2.0 * Y / x + nu * W / x),
          s * (-nu * Y / x + W * L)};
}

// theta0 is the monodromy constant; only the compatible form depends on it.
inline reduced_vars rhs_reduced(double x, const reduced_vars& v, double nu, ode_form form = ode_form::printed,
                                double theta0 = 0.0) {
  const auto [F, L] = v;
  if (x == 0.0) throw singularity_error("rhs_reduced: x = 0");
  if (form == ode_form::printed)
    return {(4.0 * L * F * F + x * F * F + (2.0 * nu + 1.0) * F + x) / x,
            ((2.0 * nu + 1.0) * L - 4.0 * L * L * F + 2.0 * x * F * L) / x};
  return {(x * F * F - 4.0 * L * F * F + (2.0 * nu - 1.0) * F + x) / x,
          ((1.0 - 2.0 * nu) * L + 4.0 * F * L * L - 2.0 * x * F * L + 0.5 * x * (theta0 + nu)) / x};
}

// The constant of motion, named theta0 / 2.
inline double theta0_half(double x, const full_vars& v, double nu) {
  const auto [L, T, W, Y] = v;
  return 2.0 * nu * L / x - nu / 2.0 + 2.0 * Y * L / (W * x) - Y / W - 2.0 * W * L * T / x;
}

inline double hamiltonian(double x, double F, double L, double nu) {
  return (-2.0 * F * F * L * L + (x * F * F + 2.0 * nu * F + x) * L - x * x / 4.0) / x;
}

// (1,1) entry of the first coefficient at infinity of the Riemann-Hilbert solution.
inline double gamma11(double x, double F, double L, double nu, double theta0) {
  return hamiltonian(x, F, L, nu) + x / 4.0 - 0.5 * F * (theta0 + nu);
}

// d/dx ln det(I - K chi_[0,x^2]) as a function of the Painleve variables.
inline double tau_density(double x, double F, double L, double nu, ode_form form, double theta0) {
  return form == ode_form::printed ? hamiltonian(x, F, L, nu) : -gamma11(x, F, L, nu, theta0);
}

// Full variables in the gauge W = 1 that reproduce (F, L) and the given theta0.
inline full_vars full_from_reduced(double x, double F, double L, double nu, double theta0) {
  if (L == 0.0) throw singularity_error("full_from_reduced: L = 0");
  const double W = 1.0;
  const double Y = -F * W * L;
  const double rest = 2.0 * nu * L / x - nu / 2.0 + 2.0 * Y * L / (W * x) - Y / W;
  const double T = (rest - theta0 / 2.0) * x / (2.0 * W * L);
  return {L, T, W, Y};
}

// ---------------------------------------------------------------- integration

struct ode_settings {
  double rtol = 1e-10;
  double atol = 1e-12;
  double blowup = 1e8;
};

namespace detail {

template <class State, class Rhs>
std::vector<State> integrate_on_grid(Rhs&& rhs, State y0, const std::vector<double>& grid, const ode_settings& cfg) {
  namespace odeint = boost::numeric::odeint;
  using stepper = odeint::runge_kutta_dopri5<State>;
  auto system = [&](const State& y, State& dy, double x) { dy = rhs(x, y); };
  std::vector<State> out;
  out.reserve(grid.size());
  auto observer = [&](const State& y, double x) {
    for (double v : y)
      if (!std::isfinite(v) || std::fabs(v) > cfg.blowup)
        throw singularity_error("trajectory blew up near x = " + std::to_string(x));
    out.push_back(y);
  };
  if (grid.size() == 1) {
    out.push_back(y0);
    return out;
  }
  try {
    odeint::integrate_times(odeint::make_dense_output(cfg.atol, cfg.rtol, stepper()), system, y0, grid.begin(),
                            grid.end(), (grid[1] - grid[0]) / 8.0, observer, odeint::max_step_checker(20000));
  } catch (const singularity_error&) {
    throw;
  } catch (const std::exception& e) {
    throw singularity_error(std::string("step-size collapse: ") + e.what());
  }
  return out;
}

}  // namespace detail

inline std::vector<double> uniform_grid(double a, double b, int n) {
  std::vector<double> g(n);
  for (int k = 0; k < n; ++k) g[k] = a + (b - a) * k / (n - 1);
  return g;
}

struct reduced_trajectory {
  std::vector<double> x;
  std::vector<double> F, L;
  std::vector<double> log_tau;  // integral of the tau density from x[0]
};

inline reduced_trajectory integrate_reduced(double nu, const painleve_state& s0, const std::vector<double>& grid,
                                            ode_form form, const ode_settings& cfg = {}) {
  using state = std::array<double, 3>;
  const double th = s0.theta0;
  auto rhs = [&](double x, const state& y) {
    const reduced_vars d = rhs_reduced(x, {y[0], y[1]}, nu, form, th);
    return state{d[0], d[1], tau_density(x, y[0], y[1], nu, form, th)};
  };
  const auto ys = detail::integrate_on_grid<state>(rhs, state{s0.F, s0.L, 0.0}, grid, cfg);
  reduced_trajectory t;
  t.x = grid;
  for (const auto& y : ys) {
    t.F.push_back(y[0]);
    t.L.push_back(y[1]);
    t.log_tau.push_back(y[2]);
  }
  return t;
}

struct full_trajectory {
  std::vector<double> x;
  std::vector<full_vars> v;
};

inline full_trajectory integrate_full(double nu, double x0, const full_vars& v0, const std::vector<double>& grid,
                                      ode_form form, const ode_settings& cfg = {}) {
  if (grid.empty() || grid.front() != x0) throw domain_error("integrate_full: grid must start at x0");
  auto rhs = [&](double x, const full_vars& y) { return rhs_full(x, y, nu, form); };
  return {grid, detail::integrate_on_grid<full_vars>(rhs, v0, grid, cfg)};
}

// ---------------------------------------------------------------- checks

struct piii_residual_result {
  double max_residual = 0.0;
  int excluded = 0;
};

// Residual of F'' - F'^2/F + F'/x + (4/x)(c F^2 + e + nu/2) - F^3 + 1/F on a uniform grid.
// printed: c = theta0, e = +1/2. compatible: c = theta0 / 2, e = -1/2.
inline piii_residual_result piii_residual(const reduced_trajectory& t, double nu, double theta0, ode_form form,
                                          double f_floor = 1e-2, bool flip_sign = false) {
  const std::size_t n = t.x.size();
  if (n < 5) throw domain_error("piii_residual: trajectory too short");
  const double h = t.x[1] - t.x[0];
  std::vector<double> fp(n);
  for (std::size_t k = 0; k < n; ++k) fp[k] = rhs_reduced(t.x[k], {t.F[k], t.L[k]}, nu, form, theta0)[0];
  const double c = form == ode_form::printed ? theta0 : theta0 / 2.0;
  const double e = form == ode_form::printed ? 0.5 : -0.5;
  const double sgn = flip_sign ? -1.0 : 1.0;
  piii_residual_result r;
  for (std::size_t k = 2; k + 2 < n; ++k) {
    const double F = t.F[k], x = t.x[k];
    if (std::fabs(F) < f_floor) {
      ++r.excluded;
      continue;
    }
    const double fpp = (-fp[k + 2] + 8.0 * fp[k + 1] - 8.0 * fp[k - 1] + fp[k - 2]) / (12.0 * h);
    const double res = fpp - fp[k] * fp[k] / F + fp[k] / x + sgn * (4.0 / x) * (c * F * F + e + nu / 2.0) - F * F * F +
                       1.0 / F;
    r.max_residual = std::max(r.max_residual, std::fabs(res));
  }
  return r;
}

// ---------------------------------------------------------------- determinant side

// zeta(x) = d/dx ln det(I - K chi_[0,x^2]) = -2x R(x^2, x^2).
inline double zeta_from_determinant(double nu, double x, int nodes) {
  return -2.0 * x * resolvent_diag(nu, interval_set({{0.0, x * x}}), x * x, nodes);
}

inline double zeta_prime_from_determinant(double nu, double x, int nodes) {
  const double h = 1e-3;
  auto z = [&](double y) { return zeta_from_determinant(nu, y, nodes); };
  const double d1 = (z(x + h) - z(x - h)) / (2.0 * h);
  const double d2 = (z(x + h / 2) - z(x - h / 2)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

struct calibration {
  painleve_state state;
  double residual = INFINITY;
  int roots_found = 0;
  bool ambiguous = false;
};

namespace detail {

// Levenberg-Marquardt with forward-difference Jacobian.
template <class Residual>
Eigen::VectorXd levenberg_marquardt(Residual&& res, Eigen::VectorXd p, int iters, double& cost) {
  double lambda = 1e-3;
  Eigen::VectorXd r = res(p);
  cost = r.squaredNorm();
  for (int it = 0; it < iters && std::isfinite(cost); ++it) {
    Eigen::MatrixXd J(r.size(), p.size());
    for (int k = 0; k < p.size(); ++k) {
      Eigen::VectorXd q = p;
      const double h = 1e-7 * std::max(1.0, std::fabs(p(k)));
      q(k) += h;
      J.col(k) = (res(q) - r) / h;
    }
    const Eigen::MatrixXd A = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 12; ++tries) {
      Eigen::MatrixXd D = A;
      D.diagonal() += lambda * (A.diagonal().array() + 1e-12).matrix();
      const Eigen::VectorXd step = D.ldlt().solve(-g);
      const Eigen::VectorXd q = p + step;
      const Eigen::VectorXd rq = res(q);
      const double cq = rq.squaredNorm();
      if (std::isfinite(cq) && cq < cost) {
        p = q;
        r = rq;
        const double drop = cost - cq;
        cost = cq;
        lambda = std::max(lambda / 10.0, 1e-12);
        improved = true;
        if (drop < 1e-30 || step.norm() < 1e-14 * (1.0 + p.norm())) return p;
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) break;
  }
  return p;
}

}  // namespace detail

struct calibration_options {
  int det_nodes = 40;
  int points = 7;
  double span = 0.3;
  bool fit_theta0 = true;
  double theta0 = 0.0;  // used when fit_theta0 is false
};

// Compatible form: fit (F, L, theta0) at x0 so that the tau density reproduces zeta on [x0, x0 + span].
inline calibration calibrate_compatible(double nu, double x0, const calibration_options& opt = {}) {
  if (!(x0 >= 0.2 && x0 <= 1.0)) throw domain_error("calibrate: x0 must lie in [0.2, 1]");
  const std::vector<double> grid = uniform_grid(x0, x0 + opt.span, opt.points);
  Eigen::VectorXd zeta(opt.points);
  for (int k = 0; k < opt.points; ++k) zeta(k) = zeta_from_determinant(nu, grid[k], opt.det_nodes);

  auto residual = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(opt.points);
    const double th = opt.fit_theta0 ? p(2) : opt.theta0;
    try {
      painleve_state s;
      s.x = x0;
      s.F = p(0);
      s.L = p(1);
      s.theta0 = th;
      const reduced_trajectory t = integrate_reduced(nu, s, grid, ode_form::compatible, {1e-11, 1e-13, 1e6});
      for (int k = 0; k < opt.points; ++k) r(k) = tau_density(grid[k], t.F[k], t.L[k], nu, ode_form::compatible, th) - zeta(k);
    } catch (const std::exception&) {
      r.setConstant(1e3);
    }
    return r;
  };

  calibration best;
  std::vector<Eigen::VectorXd> roots;
  for (double F : {-3.0, -1.5, -0.5, 0.5, 1.5})
    for (double L : {-0.5, 0.1, 0.5, 1.5})
      for (double th : {-1.0, 0.0, 1.0}) {
        if (!opt.fit_theta0 && th != 0.0) continue;
        Eigen::VectorXd p(opt.fit_theta0 ? 3 : 2);
        p(0) = F;
        p(1) = L;
        if (opt.fit_theta0) p(2) = th;
        double cost = 0.0;
        p = detail::levenberg_marquardt(residual, p, 200, cost);
        if (!std::isfinite(cost)) continue;
        const double rms = std::sqrt(cost / opt.points);
        if (rms < 1e-8) {
          bool seen = false;
          for (const auto& q : roots) seen = seen || (q - p).norm() < 1e-5;
          if (!seen) roots.push_back(p);
        }
        if (rms < best.residual) {
          best.residual = rms;
          best.state.x = x0;
          best.state.F = p(0);
          best.state.L = p(1);
          best.state.theta0 = opt.fit_theta0 ? p(2) : opt.theta0;
        }
      }
  best.roots_found = static_cast<int>(roots.size());
  best.ambiguous = roots.size() > 1;
  if (!std::isfinite(best.residual) || best.residual > 1e-6)
    throw convergence_error("calibration failed, best rms residual " + std::to_string(best.residual));
  best.state.H = hamiltonian(x0, best.state.F, best.state.L, nu);
  return best;
}

// Printed form: match H(x0) = zeta(x0) and dH/dx(x0) = zeta'(x0) by a damped Newton iteration with multistart.
inline calibration calibrate_printed(double nu, double x0, int det_nodes = 40) {
  if (!(x0 >= 0.2 && x0 <= 1.0)) throw domain_error("calibrate: x0 must lie in [0.2, 1]");
  const double z0 = zeta_from_determinant(nu, x0, det_nodes);
  const double z1 = zeta_prime_from_determinant(nu, x0, det_nodes);
  auto residual = [&](const Eigen::VectorXd& p) {
    const double F = p(0), L = p(1);
    const reduced_vars d = rhs_reduced(x0, {F, L}, nu, ode_form::printed);
    const double h = 1e-6;
    const double Hx = (hamiltonian(x0 + h, F, L, nu) - hamiltonian(x0 - h, F, L, nu)) / (2 * h);
    const double HF = (hamiltonian(x0, F + h, L, nu) - hamiltonian(x0, F - h, L, nu)) / (2 * h);
    const double HL = (hamiltonian(x0, F, L + h, nu) - hamiltonian(x0, F, L - h, nu)) / (2 * h);
    Eigen::VectorXd r(2);
    r(0) = hamiltonian(x0, F, L, nu) - z0;
    r(1) = Hx + HF * d[0] + HL * d[1] - z1;
    return r;
  };
  calibration best;
  std::vector<Eigen::VectorXd> roots;
  for (double F = -3.0; F <= 3.0; F += 0.75)
    for (double L = -1.5; L <= 1.5; L += 0.5) {
      Eigen::VectorXd p(2);
      p << F, L;
      double cost = 0.0;
      p = detail::levenberg_marquardt(residual, p, 200, cost);
      const double rms = std::sqrt(cost / 2.0);
      if (rms < 1e-9) {
        bool seen = false;
        for (const auto& q : roots) seen = seen || (q - p).norm() < 1e-5;
        if (!seen) roots.push_back(p);
      }
      if (rms < best.residual) {
        best.residual = rms;
        best.state.x = x0;
        best.state.F = p(0);
        best.state.L = p(1);
      }
    }
  best.roots_found = static_cast<int>(roots.size());
  best.ambiguous = roots.size() > 1;
  if (!std::isfinite(best.residual) || best.residual > 1e-6)
    throw convergence_error("calibration failed, best rms residual " + std::to_string(best.residual));
  best.state.H = hamiltonian(x0, best.state.F, best.state.L, nu);
  return best;
}

// Solves for T so that the full system reproduces the reduced dL/dx at x0 (gauge W = 1); returns theta0.
inline double theta0_from_reduced(double nu, double x, double F, double L, ode_form form, double theta0_guess = 0.0) {
  auto mismatch = [&](double T) {
    const full_vars d = rhs_full(x, {L, T, 1.0, -F * L}, nu, form);
    return d[0] - rhs_reduced(x, {F, L}, nu, form, theta0_guess)[1];
  };
  const double a = mismatch(0.0), b = mismatch(1.0);
  if (b == a) throw singularity_error("theta0_from_reduced: T does not enter dL/dx");
  const double T = -a / (b - a);
  return 2.0 * theta0_half(x, {L, T, 1.0, -F * L}, nu);
}

struct tau_run {
  calibration cal;
  reduced_trajectory traj;
  std::vector<double> det_anchor_times_exp;
  std::vector<double> det_direct;
  double max_rel_error = 0.0;
};

// det(I - K chi_[0,x0^2]) exp(int_{x0}^{x} density) against the direct determinant on a grid.
inline tau_run tau_from_hamiltonian(double nu, double x0, double x1, int nodes, ode_form form = ode_form::compatible,
                                    int grid_points = 51) {
  if (!(x1 >= x0)) throw domain_error("tau_from_hamiltonian: need x1 >= x0");
  if (grid_points < 2) throw domain_error("tau_from_hamiltonian: need at least two grid points");
  tau_run run;
  run.cal = form == ode_form::compatible ? calibrate_compatible(nu, x0, {nodes}) : calibrate_printed(nu, x0, nodes);
  const std::vector<double> grid = x1 > x0 ? uniform_grid(x0, x1, grid_points) : std::vector<double>{x0};
  run.traj = integrate_reduced(nu, run.cal.state, grid, form);
  const double anchor = det_real_single_value(nu, interval_set({{0.0, x0 * x0}}), nodes);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double tau = anchor * std::exp(run.traj.log_tau[k]);
    const double det = det_real_single_value(nu, interval_set({{0.0, grid[k] * grid[k]}}), nodes);
    run.det_anchor_times_exp.push_back(tau);
    run.det_direct.push_back(det);
    run.max_rel_error = std::max(run.max_rel_error, std::fabs(tau - det) / det);
  }
  return run;
}

}  // namespace besselgap
