#pragma once

#include <cmath>
#include <limits>
#include <utility>

#include "config.hpp"

namespace besselgap {

inline constexpr double bessel_z_switch = 12.0;

namespace detail {

// Ascending series for J_nu(z)/z^nu, evaluated in extended precision.
inline long double jhat_series(long double nu, long double z) {
  const long double q = -0.25L * z * z;
  long double term = 1.0L / (std::pow(2.0L, nu) * std::tgamma(nu + 1.0L));
  long double sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= q / (k * (k + nu));
    sum += term;
    if (std::fabs(term) <= 1e-21L * std::fabs(sum) && k > z) return sum;
  }
  throw convergence_error("Bessel series did not converge");
}

inline double j_series(double nu, double z) {
  if (z == 0.0) return nu == 0.0 ? 1.0 : (nu > 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  return static_cast<double>(jhat_series(nu, z) * std::pow(static_cast<long double>(z), nu));
}

// Steed's method with Temme's CF2 for x >= 2 and nu >= 0: returns (J_nu, J'_nu).
inline std::pair<double, double> j_steed_nonneg(double nu_in, double x_in) {
  using real = long double;
  const real nu = nu_in, x = x_in;
  constexpr int maxit = 100000;
  constexpr real eps = 1e-19L;
  constexpr real fpmin = 1e-300L;
  int nl = static_cast<int>(nu - x + 1.5L);
  if (nl < 0) nl = 0;
  const real xmu = nu - nl;
  const real xmu2 = xmu * xmu;
  const real xi = 1.0 / x;
  const real xi2 = 2.0 * xi;
  const real w = xi2 / 3.141592653589793238462643383279502884L;

  int isign = 1;
  real h = nu * xi;
  if (h < fpmin) h = fpmin;
  real b = xi2 * nu, d = 0.0, c = h;
  int i = 1;
  for (; i <= maxit; ++i) {
    b += xi2;
    d = b - d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = b - 1.0 / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const real del = c * d;
    h *= del;
    if (d < 0.0) isign = -isign;
    if (std::fabs(del - 1.0) < eps) break;
  }
  if (i > maxit) throw convergence_error("Bessel CF1 did not converge");

  real rjl = isign * fpmin;
  real rjpl = h * rjl;
  const real rjl1 = rjl;
  const real rjp1 = rjpl;
  real fact = nu * xi;
  for (int l = nl; l >= 1; --l) {
    const real rjtemp = fact * rjl + rjpl;
    fact -= xi;
    rjpl = fact * rjtemp - rjl;
    rjl = rjtemp;
  }
  if (rjl == 0.0) rjl = eps;
  const real f = rjpl / rjl;

  real a = 0.25 - xmu2;
  real p = -0.5 * xi;
  real q = 1.0;
  const real br = 2.0 * x;
  real bi = 2.0;
  fact = a * xi / (p * p + q * q);
  real cr = br + q * fact;
  real ci = bi + p * fact;
  real den = br * br + bi * bi;
  real dr = br / den;
  real di = -bi / den;
  real dlr = cr * dr - ci * di;
  real dli = cr * di + ci * dr;
  real temp = p * dlr - q * dli;
  q = p * dli + q * dlr;
  p = temp;
  for (i = 2; i <= maxit; ++i) {
    a += 2 * (i - 1);
    bi += 2.0;
    dr = a * dr + br;
    di = a * di + bi;
    if (std::fabs(dr) + std::fabs(di) < fpmin) dr = fpmin;
    fact = a / (cr * cr + ci * ci);
    cr = br + cr * fact;
    ci = bi - ci * fact;
    if (std::fabs(cr) + std::fabs(ci) < fpmin) cr = fpmin;
    den = dr * dr + di * di;
    dr /= den;
    di = -di / den;
    dlr = cr * dr - ci * di;
    dli = cr * di + ci * dr;
    temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    if (std::fabs(dlr - 1.0) + std::fabs(dli) < eps) break;
  }
  if (i > maxit) throw convergence_error("Bessel CF2 did not converge");

  const real gam = (p - f) / q;
  real rjmu = std::sqrt(w / ((p - f) * gam + q));
  rjmu = std::copysign(rjmu, rjl);
  fact = rjmu / rjl;
  return {static_cast<double>(rjl1 * fact), static_cast<double>(rjp1 * fact)};
}

// Large-argument path for any nu > -1; negative orders go through nu + 1.
inline double j_steed(double nu, double x) {
  if (nu >= 0.0) return j_steed_nonneg(nu, x).first;
  const auto [j1, jp1] = j_steed_nonneg(nu + 1.0, x);
  return jp1 + (nu + 1.0) / x * j1;
}

}  // namespace detail

inline double bessel_j(double nu, double z) {
  require_order(nu);
  if (!(z >= 0.0)) throw domain_error("bessel_j requires z >= 0");
  if (z <= bessel_z_switch) return detail::j_series(nu, z);
  return detail::j_steed(nu, z);
}

// J_nu(z) / z^nu, finite at z = 0.
inline double bessel_jhat(double nu, double z) {
  require_order(nu);
  if (!(z >= 0.0)) throw domain_error("bessel_jhat requires z >= 0");
  if (z <= bessel_z_switch) return static_cast<double>(detail::jhat_series(nu, z));
  return detail::j_steed(nu, z) / std::pow(z, nu);
}

inline double bessel_j_deriv(double nu, double z) {
  require_order(nu);
  if (!(z > 0.0)) throw domain_error("bessel_j_deriv requires z > 0");
  // (J_{nu-1} - J_{nu+1})/2 rewritten so that the order never drops below -1.
  return nu / z * bessel_j(nu, z) - bessel_j(nu + 1.0, z);
}

}  // namespace besselgap
