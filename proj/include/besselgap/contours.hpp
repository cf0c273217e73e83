#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "config.hpp"
#include "quadrature.hpp"

namespace besselgap {

using cplx = std::complex<double>;

enum class contour_label { gamma, gamma_hat, gamma_shift };

struct contour_geometry {
  double ray_angle = 3.0 * pi / 4.0;
  double arc_radius = 1.5;
  double truncation_radius = 0.0;  // 0 selects the automatic rule
  int nodes_per_leg = 60;
};

struct contour {
  std::vector<cplx> points;
  std::vector<cplx> weights;  // quadrature weight times dlambda/du
  contour_label label = contour_label::gamma;
  int shift_index = -1;
  double ray_angle = 0.0;
  double arc_radius = 0.0;
  double truncation_radius = 0.0;

  std::size_t size() const { return points.size(); }
};

// Lower ray in from R e^{-i theta}, counterclockwise arc of radius r, upper ray out to R e^{i theta}.
// Rays use rho = r e^v with Gauss-Legendre in v, which grades the nodes towards the arc.
inline contour build_gamma(double ray_angle, double arc_radius, double truncation_radius, int nodes_per_leg) {
  if (!(ray_angle > pi / 2 && ray_angle < pi)) throw geometry_error("build_gamma: ray_angle must lie in (pi/2, pi)");
  if (!(arc_radius > 0.0 && arc_radius < truncation_radius))
    throw geometry_error("build_gamma: need 0 < arc_radius < truncation_radius");
  if (nodes_per_leg < 1) throw geometry_error("build_gamma: nodes_per_leg must be positive");

  contour c;
  c.label = contour_label::gamma;
  c.ray_angle = ray_angle;
  c.arc_radius = arc_radius;
  c.truncation_radius = truncation_radius;

  const quadrature_rule ray = map_to_interval(gauss_legendre(nodes_per_leg), 0.0, std::log(truncation_radius / arc_radius));
  const quadrature_rule arc = map_to_interval(gauss_legendre(nodes_per_leg), -ray_angle, ray_angle);
  const cplx lower = std::polar(1.0, -ray_angle);
  const cplx upper = std::polar(1.0, ray_angle);

  for (int k = nodes_per_leg - 1; k >= 0; --k) {
    const double rho = arc_radius * std::exp(ray.nodes[k]);
    c.points.push_back(rho * lower);
    c.weights.push_back(-lower * rho * ray.weights[k]);
  }
  for (int k = 0; k < nodes_per_leg; ++k) {
    const cplx z = std::polar(arc_radius, arc.nodes[k]);
    c.points.push_back(z);
    c.weights.push_back(cplx(0.0, 1.0) * z * arc.weights[k]);
  }
  for (int k = 0; k < nodes_per_leg; ++k) {
    const double rho = arc_radius * std::exp(ray.nodes[k]);
    c.points.push_back(rho * upper);
    c.weights.push_back(upper * rho * ray.weights[k]);
  }
  return c;
}

inline contour build_gamma(const contour_geometry& g, double truncation_radius) {
  return build_gamma(g.ray_angle, g.arc_radius, g.truncation_radius > 0.0 ? g.truncation_radius : truncation_radius,
                     g.nodes_per_leg);
}

// lambda -> 1/lambda - shift with dlambda -> -dlambda / lambda^2.
inline contour invert_shift(const contour& c, double tau) {
  contour out = c;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const cplx z = c.points[i];
    if (z == cplx(0.0, 0.0)) throw singularity_error("invert: sample at the origin");
    out.points[i] = 1.0 / z - 4.0 * tau;
    out.weights[i] = -c.weights[i] / (z * z);
  }
  out.label = contour_label::gamma_shift;
  return out;
}

inline contour invert(const contour& c) {
  contour out = invert_shift(c, 0.0);
  out.label = (c.label == contour_label::gamma_hat) ? contour_label::gamma : contour_label::gamma_hat;
  return out;
}

inline contour invert_shift(const contour& c, double tau, int k) {
  contour out = invert_shift(c, tau);
  out.shift_index = k;
  return out;
}

// Smallest distance from a sample to the negative real axis, where the logarithm is cut.
inline double cut_clearance(const contour& c, double shift = 0.0) {
  double best = INFINITY;
  for (const cplx& p : c.points) {
    const cplx z = p + shift;
    const double d = z.real() <= 0.0 ? std::fabs(z.imag()) : std::abs(z);
    best = std::min(best, d);
  }
  return best;
}

inline void require_cut_clearance(const contour& c, double shift = 0.0, double eps = 1e-3) {
  if (cut_clearance(c, shift) < eps) throw geometry_error("contour sample within clearance of the branch cut");
}

// Sum of w / (2 pi i z) over the samples.
inline cplx winding_sum(const contour& c, cplx center = 0.0) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) s += c.weights[i] / (c.points[i] - center);
  return s / cplx(0.0, 2.0 * pi);
}

inline double min_distance(const contour& a, const contour& b) {
  double best = INFINITY;
  for (const cplx& p : a.points)
    for (const cplx& q : b.points) best = std::min(best, std::abs(p - q));
  return best;
}

}  // namespace besselgap
