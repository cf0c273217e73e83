#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "config.hpp"
#include "contours.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"

namespace besselgap {

// ---------------------------------------------------------------- domain types

struct signed_endpoint {
  double a;
  int sigma;
};

class interval_set {
 public:
  interval_set() = default;
  explicit interval_set(std::vector<std::pair<double, double>> iv) : intervals_(std::move(iv)) {
    std::sort(intervals_.begin(), intervals_.end());
    for (std::size_t k = 0; k < intervals_.size(); ++k) {
      const auto [lo, hi] = intervals_[k];
      if (!std::isfinite(lo) || !std::isfinite(hi)) throw domain_error("interval endpoints must be finite");
      if (!(lo >= 0.0 && hi > lo)) throw domain_error("intervals must satisfy 0 <= lo < hi");
      if (k > 0 && !(lo > intervals_[k - 1].second)) throw domain_error("intervals must be disjoint");
    }
  }

  const std::vector<std::pair<double, double>>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }

  // chi_I = sum_j sigma_j chi_[0, a_j], endpoints ascending.
  std::vector<signed_endpoint> signed_endpoints() const {
    std::vector<signed_endpoint> out;
    for (const auto& [lo, hi] : intervals_) {
      if (lo > 0.0) out.push_back({lo, -1});
      out.push_back({hi, +1});
    }
    return out;
  }

  bool contains(double x) const {
    for (const auto& [lo, hi] : intervals_)
      if (x >= lo && x <= hi) return true;
    return false;
  }

 private:
  std::vector<std::pair<double, double>> intervals_;
};

class time_config {
 public:
  time_config(std::vector<double> times, std::vector<double> ends) : times_(std::move(times)), ends_(std::move(ends)) {
    if (times_.empty() || times_.size() != ends_.size()) throw domain_error("time_config: times and ends must match");
    for (std::size_t k = 0; k < times_.size(); ++k) {
      if (!(ends_[k] > 0.0)) throw domain_error("time_config: ends must be positive");
      if (k > 0 && !(times_[k] > times_[k - 1])) throw domain_error("time_config: times must increase strictly");
    }
  }
  std::size_t size() const { return times_.size(); }
  double time(std::size_t k) const { return times_[k]; }
  double end(std::size_t k) const { return ends_[k]; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& ends() const { return ends_; }
  double delta(std::size_t i, std::size_t j) const { return times_[i] - times_[j]; }

 private:
  std::vector<double> times_;
  std::vector<double> ends_;
};

// ---------------------------------------------------------------- phases

inline cplx theta_general(double a, double nu, cplx lam) { return a * lam - 1.0 / (4.0 * lam) - nu * std::log(lam); }

inline cplx theta_rescaled(double x, double nu, cplx lam) { return 0.5 * x * (lam - 1.0 / lam) - nu * std::log(lam); }

inline cplx theta_multitime(double a, double tau, double nu, cplx lam) {
  const cplx li = lam + 4.0 * tau;
  return lam / 4.0 - a / li - nu * std::log(li);
}

// ---------------------------------------------------------------- single time

inline double kb_single_diag(double nu, double x) {
  require_order(nu);
  if (!(x > 0.0)) throw domain_error("kb_single_diag requires x > 0");
  const double u = std::sqrt(x);
  const double j0 = bessel_j(nu, u);
  const double j1 = bessel_j(nu + 1.0, u);
  return 0.25 * (j0 * j0 + j1 * j1 - 2.0 * nu / u * j0 * j1);
}

namespace detail {

inline double kb_offdiag(double nu, double x, double y) {
  if (x > y) std::swap(x, y);
  const double sx = std::sqrt(x), sy = std::sqrt(y);
  const double num = sx * bessel_j(nu + 1.0, sx) * bessel_j(nu, sy) - bessel_j(nu, sx) * sy * bessel_j(nu + 1.0, sy);
  return num / (2.0 * (x - y));
}

inline bool near_diagonal(double x, double y) { return std::fabs(x - y) < 1e-4 * std::max(x, y); }

// Symmetric kernel near the diagonal: K(m-h, m+h) = d(m) + c(m) h^2 + O(h^4).
template <class Off, class Diag>
double near_diagonal_value(Off&& off, Diag&& diag, double x, double y) {
  const double m = 0.5 * (x + y);
  const double h = 0.5 * (y - x);
  const double d = diag(m);
  if (h == 0.0) return d;
  const double H = 1e-2 * m;
  const double c = (off(m - H, m + H) - d) / (H * H);
  return d + c * h * h;
}

}  // namespace detail

inline double kb_single(double nu, double x, double y) {
  require_order(nu);
  if (!(x > 0.0 && y > 0.0)) throw domain_error("kb_single requires x, y > 0");
  if (detail::near_diagonal(x, y))
    return detail::near_diagonal_value([nu](double p, double q) { return detail::kb_offdiag(nu, p, q); },
                                       [nu](double p) { return kb_single_diag(nu, p); }, x, y);
  return detail::kb_offdiag(nu, x, y);
}

// Kernel for nu = +1/2 (half_sign = +1) or nu = -1/2 (half_sign = -1) in elementary functions.
inline double kb_half_diag(int half_sign, double x) {
  if (!(x > 0.0)) throw domain_error("kb_half_diag requires x > 0");
  const double u = std::sqrt(x);
  const double s = std::sin(2.0 * u) / (2.0 * u);
  return (half_sign > 0 ? 1.0 - s : 1.0 + s) / (2.0 * pi * u);
}

inline double kb_half(int half_sign, double x, double y) {
  if (!(x > 0.0 && y > 0.0)) throw domain_error("kb_half requires x, y > 0");
  auto off = [half_sign](double p, double q) {
    const double u = std::sqrt(p), v = std::sqrt(q);
    double num;
    if (half_sign > 0) {
      // sqrt(p) J_{3/2}(u) J_{1/2}(v) - J_{1/2}(u) sqrt(q) J_{3/2}(v), times pi sqrt(uv) / 2
      num = (std::sin(u) / u - std::cos(u)) * u * std::sin(v) - std::sin(u) * v * (std::sin(v) / v - std::cos(v));
    } else {
      // sqrt(p) J_{1/2}(u) J_{-1/2}(v) - J_{-1/2}(u) sqrt(q) J_{1/2}(v), times pi sqrt(uv) / 2
      num = u * std::sin(u) * std::cos(v) - std::cos(u) * v * std::sin(v);
    }
    return num * (2.0 / (pi * std::sqrt(u * v))) / (2.0 * (p - q));
  };
  if (detail::near_diagonal(x, y))
    return detail::near_diagonal_value(off, [half_sign](double p) { return kb_half_diag(half_sign, p); }, x, y);
  return off(x, y);
}

// ---------------------------------------------------------------- multi time (real axis)

// (1/4) int_0^1 e^{u delta} J_nu(sqrt(xu)) J_nu(sqrt(yu)) du with u = v^2 and a Jacobi weight v^{2nu+1}.
class multi_head_rule {
 public:
  multi_head_rule(double nu, int n) : nu_(nu), rule_(jacobi_left(n, 2.0 * nu + 1.0, 0.0, 1.0)) { require_order(nu); }

  double nu() const { return nu_; }
  const quadrature_rule& rule() const { return rule_; }

  // Values (x)^{nu/2} Jhat(v_q sqrt(x)) for every node v_q.
  std::vector<double> profile(double x) const {
    std::vector<double> out(rule_.size());
    const double sx = std::sqrt(x);
    const double pre = std::pow(x, 0.5 * nu_);
    for (std::size_t q = 0; q < rule_.size(); ++q) out[q] = pre * bessel_jhat(nu_, rule_.nodes[q] * sx);
    return out;
  }

  double combine(const std::vector<double>& px, const std::vector<double>& py, double delta) const {
    double s = 0.0;
    for (std::size_t q = 0; q < rule_.size(); ++q) {
      const double v = rule_.nodes[q];
      s += rule_.weights[q] * std::exp(v * v * delta) * px[q] * py[q];
    }
    return 0.5 * s;
  }

  double value(double x, double y, double delta) const { return combine(profile(x), profile(y), delta); }

 private:
  double nu_;
  quadrature_rule rule_;
};

// -(1/4) int_1^inf e^{u delta} J_nu(sqrt(xu)) J_nu(sqrt(yu)) du for delta < 0.
inline double kb_multi_tail(double nu, double delta, double x, double y, int n = 60) {
  if (!(delta < 0.0)) throw domain_error("kb_multi_tail requires delta < 0");
  const quadrature_rule r = laguerre_tail(n, -delta);
  double s = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) {
    const double u = r.nodes[q];
    s += r.weights[q] * bessel_j(nu, std::sqrt(x * u)) * bessel_j(nu, std::sqrt(y * u));
  }
  return -0.25 * std::exp(delta) * s;
}

namespace detail {

// e^{-z} I_nu(z) for large z.
inline double scaled_bessel_i_asymptotic(double nu, double z) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double t = 2.0 * k - 1.0;
    term *= -(mu - t * t) / (8.0 * k * z);
    sum += term;
    if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
  }
  return sum / std::sqrt(2.0 * pi * z);
}

}  // namespace detail

// e^{-z} I_nu(z) = (1/2 pi i) int_gamma e^{(z/2)(s + 1/s) - z} s^{-nu-1} ds, gamma through the saddle s = 1.
inline double scaled_bessel_i(double nu, double z, int nodes_per_leg = 80) {
  if (!(z > 0.0)) throw domain_error("scaled_bessel_i requires z > 0");
  if (z > 60.0) return detail::scaled_bessel_i_asymptotic(nu, z);
  const double theta = 3.0 * pi / 4.0;
  const double R = std::max(4.0, 100.0 / (z * std::fabs(std::cos(theta))));
  const contour g = build_gamma(theta, 1.0, R, nodes_per_leg);
  cplx s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const cplx t = g.points[k];
    s += g.weights[k] * std::exp(0.5 * z * (t + 1.0 / t) - z - (nu + 1.0) * std::log(t));
  }
  return (s / cplx(0.0, 2.0 * pi)).real();
}

// -(1/4) int_0^inf e^{-cu} J_nu(sqrt(xu)) J_nu(sqrt(yu)) du = -(1/(4c)) e^{-(x+y)/(4c)} I_nu(sqrt(xy)/(2c)).
inline double weber_tail(double nu, double c, double x, double y) {
  if (!(c > 0.0)) throw domain_error("weber_tail requires c > 0");
  const double z = std::sqrt(x * y) / (2.0 * c);
  const double gap = std::sqrt(x) - std::sqrt(y);
  return -0.25 / c * std::exp(-gap * gap / (4.0 * c)) * scaled_bessel_i(nu, z);
}

inline double hb_entry(double nu, const time_config& tc, std::size_t i, std::size_t j, double x, double y) {
  if (i >= j) return 0.0;
  return weber_tail(nu, -tc.delta(i, j), x, y);
}

enum class multi_route { split, laguerre };

inline double kb_multi_entry(double nu, const time_config& tc, std::size_t i, std::size_t j, double x, double y,
                             int rule_budget = 48, multi_route route = multi_route::split) {
  if (i >= tc.size() || j >= tc.size()) throw domain_error("kb_multi_entry: index out of range");
  if (!(x > 0.0 && y > 0.0)) throw domain_error("kb_multi_entry requires x, y > 0");
  const double delta = tc.delta(i, j);
  if (i >= j) return multi_head_rule(nu, rule_budget).value(x, y, delta);
  if (route == multi_route::laguerre) return kb_multi_tail(nu, delta, x, y, rule_budget);
  return multi_head_rule(nu, rule_budget).value(x, y, delta) + hb_entry(nu, tc, i, j, x, y);
}

// ---------------------------------------------------------------- single-time IIKS

// f, g columns of the integrable kernel on gamma (on_hat = false) or on gamma-hat (on_hat = true).
struct iiks_columns {
  std::vector<cplx> f;
  std::vector<cplx> g;
};

inline iiks_columns iiks_fg_single(double nu, const interval_set& iset, cplx s, bool on_hat) {
  const auto ends = iset.signed_endpoints();
  if (ends.empty()) throw domain_error("iiks_fg_single: empty interval set");
  if (s.real() < 0.0 && s.imag() == 0.0) throw singularity_error("iiks_fg_single: point on the branch cut");
  const std::size_t n = ends.size();
  const double a1 = ends.front().a;
  const cplx two_pi_i(0.0, 2.0 * pi);
  iiks_columns c{std::vector<cplx>(n + 1, 0.0), std::vector<cplx>(n + 1, 0.0)};
  if (!on_hat) {
    c.f[0] = std::exp(a1 * s / 2.0 - 1.0 / (4.0 * s) - nu * std::log(s)) / two_pi_i;
    for (std::size_t j = 0; j < n; ++j) c.g[j + 1] = std::exp(s * (ends[j].a - a1 / 2.0));
  } else {
    for (std::size_t j = 0; j < n; ++j)
      c.f[j + 1] = double(ends[j].sigma) * std::exp(-ends[j].a * s + 1.0 / (4.0 * s) + nu * std::log(s)) / two_pi_i;
    c.g[0] = 1.0;
  }
  return c;
}

inline cplx iiks_kernel_single(double nu, const interval_set& iset, cplx s, bool s_hat, cplx t, bool t_hat) {
  if (s_hat == t_hat) return 0.0;
  const auto fs = iiks_fg_single(nu, iset, s, s_hat).f;
  const auto gt = iiks_fg_single(nu, iset, t, t_hat).g;
  cplx num = 0.0;
  for (std::size_t k = 0; k < fs.size(); ++k) num += fs[k] * gt[k];
  return num / (s - t);
}

// ---------------------------------------------------------------- multi-time IIKS blocks

enum class block_constants { derived, printed };

inline cplx principal_pow(cplx z, double p) { return std::exp(p * std::log(z)); }

// M_ij(t, eta): t on gamma, eta on gamma_{-i}.
inline cplx block_m(double nu, const time_config& tc, std::size_t i, std::size_t j, cplx t, cplx eta) {
  const cplx eta_i = eta + 4.0 * tc.time(i);
  const cplx t_j = t + 4.0 * tc.time(j);
  return std::exp(-eta / 4.0 + t / 4.0) / (eta - t) * principal_pow(eta_i, nu) / principal_pow(t_j, nu) /
         cplx(0.0, 2.0 * pi);
}

inline cplx block_coefficient(block_constants k) { return k == block_constants::printed ? cplx(4.0) : -1.0 / cplx(0.0, 2.0 * pi); }

// N_ij(xi, t): xi on gamma_{-j}, t on gamma; diagonal in (i, j).
inline cplx block_n(const time_config& tc, std::size_t i, std::size_t j, cplx xi, cplx t,
                    block_constants k = block_constants::derived) {
  if (i != j) return 0.0;
  const cplx xi_j = xi + 4.0 * tc.time(j);
  const cplx t_j = t + 4.0 * tc.time(j);
  return block_coefficient(k) * std::exp(tc.end(j) * (1.0 / xi_j - 1.0 / t_j)) / (xi - t);
}

// H_ij(xi, eta): xi on gamma_{-j}, eta on gamma_{-i}; nonzero only for tau_i < tau_j.
inline cplx block_h(double nu, const time_config& tc, std::size_t i, std::size_t j, cplx xi, cplx eta,
                    block_constants k = block_constants::derived) {
  if (!(tc.time(i) < tc.time(j))) return 0.0;
  const cplx xi_j = xi + 4.0 * tc.time(j);
  const cplx eta_j = eta + 4.0 * tc.time(j);
  const cplx eta_i = eta + 4.0 * tc.time(i);
  return block_coefficient(k) * std::exp(tc.end(j) * (1.0 / xi_j - 1.0 / eta_j)) / (xi - eta) *
         principal_pow(eta_i, nu) / principal_pow(eta_j, nu);
}

}  // namespace besselgap
