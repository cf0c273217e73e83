#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "config.hpp"
#include "contours.hpp"
#include "kernels.hpp"
#include "quadrature.hpp"

namespace besselgap {

struct det_result {
  double det = 1.0;
  double conv = 0.0;  // |det(n) - det(n/2)|
  int nodes = 0;
};

struct real_nodes {
  std::vector<double> x;
  std::vector<double> w;
};

// x = s^2 on each interval, Gauss-Legendre in s; optional Gauss-Jacobi s^{2nu+1} on a panel touching 0.
inline real_nodes build_real_nodes(const interval_set& iset, int n, double nu = 0.0, bool jacobi_at_zero = false) {
  if (n < 1) throw domain_error("node budget must be positive");
  real_nodes out;
  const quadrature_rule gl = gauss_legendre(n);
  for (const auto& [lo, hi] : iset.intervals()) {
    const double s0 = std::sqrt(lo), s1 = std::sqrt(hi);
    if (jacobi_at_zero && lo == 0.0) {
      const quadrature_rule r = jacobi_left(n, 2.0 * nu + 1.0, 0.0, s1);
      for (int k = 0; k < n; ++k) {
        const double s = r.nodes[k];
        out.x.push_back(s * s);
        out.w.push_back(2.0 * r.weights[k] * std::pow(s, -2.0 * nu));
      }
    } else {
      const quadrature_rule r = map_to_interval(gl, s0, s1);
      for (int k = 0; k < n; ++k) {
        out.x.push_back(r.nodes[k] * r.nodes[k]);
        out.w.push_back(2.0 * r.nodes[k] * r.weights[k]);
      }
    }
  }
  return out;
}

// W^{1/2} K W^{1/2} for a real symmetric kernel.
template <class Kernel>
Eigen::MatrixXd nystrom_matrix(Kernel&& k, const real_nodes& nd) {
  const int m = static_cast<int>(nd.x.size());
  Eigen::MatrixXd A(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      const double v = std::sqrt(nd.w[i] * nd.w[j]) * k(nd.x[i], nd.x[j]);
      A(i, j) = v;
      A(j, i) = v;
    }
  return A;
}

inline double det_identity_minus(const Eigen::MatrixXd& A) {
  if (A.rows() == 0) return 1.0;
  return (Eigen::MatrixXd::Identity(A.rows(), A.cols()) - A).partialPivLu().determinant();
}

inline cplx det_identity_minus(const Eigen::MatrixXcd& A) {
  if (A.rows() == 0) return 1.0;
  return (Eigen::MatrixXcd::Identity(A.rows(), A.cols()) - A).partialPivLu().determinant();
}

// Carleman det_2(I - A) = det(I - A) e^{tr A}.
inline double det2_identity_minus(const Eigen::MatrixXd& A) { return det_identity_minus(A) * std::exp(A.trace()); }

struct real_options {
  bool jacobi_at_zero = false;
  double tol = -1.0;  // throw convergence_error when |det(n) - det(n/2)| exceeds tol; negative disables
};

template <class Kernel>
double det_real_kernel(Kernel&& k, const interval_set& iset, int n, double nu, bool jacobi) {
  if (iset.empty()) return 1.0;
  const real_nodes nd = build_real_nodes(iset, n, nu, jacobi);
  return det_identity_minus(nystrom_matrix(k, nd));
}

inline double det_real_single_value(double nu, const interval_set& iset, int n, bool jacobi_at_zero = false) {
  require_order(nu);
  return det_real_kernel([nu](double x, double y) { return kb_single(nu, x, y); }, iset, n, nu, jacobi_at_zero);
}

inline det_result det_real_single(double nu, const interval_set& iset, int n, const real_options& opt = {}) {
  require_order(nu);
  if (n < 8) throw domain_error("det_real_single: node budget must be at least 8");
  det_result r;
  r.nodes = n;
  r.det = det_real_single_value(nu, iset, n, opt.jacobi_at_zero);
  r.conv = std::fabs(r.det - det_real_single_value(nu, iset, n / 2, opt.jacobi_at_zero));
  if (opt.tol >= 0.0 && r.conv > opt.tol) throw convergence_error("det_real_single: node halving changed det beyond tolerance");
  return r;
}

// Same pipeline with the elementary-function kernel for nu = half_sign / 2.
inline double det_real_half(int half_sign, const interval_set& iset, int n) {
  return det_real_kernel([half_sign](double x, double y) { return kb_half(half_sign, x, y); }, iset, n,
                         0.5 * half_sign, false);
}

// Resolvent kernel R = K (I - K chi)^{-1} on the diagonal at a point a.
inline double resolvent_diag(double nu, const interval_set& iset, double a, int n) {
  const real_nodes nd = build_real_nodes(iset, n, nu, false);
  const int m = static_cast<int>(nd.x.size());
  const Eigen::MatrixXd A = nystrom_matrix([nu](double x, double y) { return kb_single(nu, x, y); }, nd);
  Eigen::VectorXd ka(m);
  for (int i = 0; i < m; ++i) ka(i) = std::sqrt(nd.w[i]) * kb_single(nu, nd.x[i], a);
  const Eigen::VectorXd sol = (Eigen::MatrixXd::Identity(m, m) - A).partialPivLu().solve(ka);
  return kb_single_diag(nu, a) + ka.dot(sol);
}

struct logderiv_result {
  double finite_difference = 0.0;
  double resolvent = 0.0;
};

// d/da_j ln det(I - K chi_I) for the j-th signed endpoint, by two routes.
inline logderiv_result logderiv_endpoint(double nu, const interval_set& iset, std::size_t j, int n) {
  const auto ends = iset.signed_endpoints();
  if (j >= ends.size()) throw domain_error("logderiv_endpoint: endpoint index out of range");
  const double a = ends[j].a;
  const int sigma = ends[j].sigma;

  auto moved = [&](double h) {
    std::vector<std::pair<double, double>> iv = iset.intervals();
    for (auto& [lo, hi] : iv) {
      if (sigma > 0 && hi == a) hi += h;
      if (sigma < 0 && lo == a) lo += h;
    }
    return std::log(det_real_single_value(nu, interval_set(iv), n));
  };
  double room = a;
  for (const auto& e : ends)
    if (e.a != a) room = std::min(room, std::fabs(e.a - a));
  const double h = std::min(1e-3 * std::max(1.0, a), 0.25 * room);
  const double d1 = (moved(h) - moved(-h)) / (2.0 * h);
  const double d2 = (moved(h / 2) - moved(-h / 2)) / h;

  logderiv_result r;
  r.finite_difference = (4.0 * d2 - d1) / 3.0;
  r.resolvent = -sigma * resolvent_diag(nu, iset, a, n);
  return r;
}

// ---------------------------------------------------------------- multi time, real axis

struct multi_options {
  int rule_budget = 48;
  multi_route route = multi_route::split;
};

inline double det_real_multi_value(double nu, const time_config& tc, int n, const multi_options& opt = {}) {
  require_order(nu);
  const std::size_t T = tc.size();
  const multi_head_rule head(nu, opt.rule_budget);
  std::vector<real_nodes> nodes;
  std::vector<std::vector<std::vector<double>>> prof(T);
  for (std::size_t k = 0; k < T; ++k) {
    nodes.push_back(build_real_nodes(interval_set({{0.0, tc.end(k)}}), n));
    for (double x : nodes[k].x) prof[k].push_back(head.profile(x));
  }
  const int m = static_cast<int>(T) * n;
  Eigen::MatrixXd A(m, m);
  for (std::size_t i = 0; i < T; ++i)
    for (std::size_t j = 0; j < T; ++j) {
      const double delta = tc.delta(i, j);
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          const double x = nodes[i].x[p], y = nodes[j].x[q];
          double k;
          if (i < j && opt.route == multi_route::laguerre)
            k = kb_multi_tail(nu, delta, x, y, opt.rule_budget);
          else {
            k = head.combine(prof[i][p], prof[j][q], delta);
            if (i < j) k += weber_tail(nu, -delta, x, y);
          }
          A(static_cast<int>(i) * n + p, static_cast<int>(j) * n + q) = std::sqrt(nodes[i].w[p] * nodes[j].w[q]) * k;
        }
    }
  return det_identity_minus(A);
}

inline det_result det_real_multi(double nu, const time_config& tc, int n, const multi_options& opt = {}) {
  det_result r;
  r.nodes = n;
  r.det = det_real_multi_value(nu, tc, n, opt);
  r.conv = std::fabs(r.det - det_real_multi_value(nu, tc, n / 2, opt));
  return r;
}

// ---------------------------------------------------------------- contour determinants

inline double default_truncation_single(double a1) { return std::max(220.0, 110.0 / a1); }

inline cplx det_contour_single(double nu, const interval_set& iset, const contour_geometry& geo = {}) {
  require_order(nu);
  if (iset.empty()) return 1.0;
  const auto ends = iset.signed_endpoints();
  const contour g = build_gamma(geo, default_truncation_single(ends.front().a));
  const contour gh = invert(g);
  if (min_distance(g, gh) < 1e-8) throw geometry_error("gamma and its inverse image intersect");
  require_cut_clearance(g);
  require_cut_clearance(gh);

  const int m = static_cast<int>(g.size());
  const int N = static_cast<int>(ends.size());
  Eigen::MatrixXcd F(2 * m, N + 1), G(2 * m, N + 1);
  std::vector<cplx> pts(2 * m), wts(2 * m);
  for (int k = 0; k < m; ++k) {
    pts[k] = g.points[k];
    wts[k] = g.weights[k];
    pts[m + k] = gh.points[k];
    wts[m + k] = gh.weights[k];
  }
  for (int k = 0; k < 2 * m; ++k) {
    const iiks_columns c = iiks_fg_single(nu, iset, pts[k], k >= m);
    for (int l = 0; l <= N; ++l) {
      F(k, l) = c.f[l];
      G(k, l) = c.g[l];
    }
  }
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(2 * m, 2 * m);
  for (int s = 0; s < 2 * m; ++s)
    for (int t = 0; t < 2 * m; ++t) {
      if ((s < m) == (t < m)) continue;
      B(s, t) = F.row(s).cwiseProduct(G.row(t)).sum() / (pts[s] - pts[t]) * wts[t];
    }
  return det_identity_minus(B);
}

struct multi_contour_options {
  contour_geometry geometry{};
  bool include_h = true;
  block_constants constants = block_constants::derived;
};

// Arc radius keeping the loops 1/gamma - 4 tau_k pairwise disjoint.
inline double default_arc_radius_multi(const time_config& tc) {
  double gap = INFINITY;
  for (std::size_t k = 1; k < tc.size(); ++k) gap = std::min(gap, tc.time(k) - tc.time(k - 1));
  return std::isfinite(gap) ? std::max(1.5, 1.75 / (4.0 * gap)) : 1.5;
}

inline cplx det_contour_multi(double nu, const time_config& tc, const multi_contour_options& opt = {}) {
  require_order(nu);
  const std::size_t T = tc.size();
  contour_geometry geo = opt.geometry;
  const double rdef = default_arc_radius_multi(tc);
  if (geo.arc_radius < rdef) geo.arc_radius = rdef;
  geo.nodes_per_leg = std::max(geo.nodes_per_leg, static_cast<int>(std::ceil(10.0 * geo.arc_radius)));
  const double amin = *std::min_element(tc.ends().begin(), tc.ends().end());
  const contour g = build_gamma(geo, std::max(220.0, 60.0 / amin));
  std::vector<contour> shifted;
  for (std::size_t k = 0; k < T; ++k) {
    shifted.push_back(invert_shift(g, tc.time(k), static_cast<int>(k)));
    require_cut_clearance(shifted.back(), 4.0 * tc.time(k));
  }
  for (std::size_t k = 0; k < T; ++k) {
    if (min_distance(g, shifted[k]) < 1e-8) throw geometry_error("gamma meets a shifted inverse contour");
    for (std::size_t l = k + 1; l < T; ++l)
      if (min_distance(shifted[k], shifted[l]) < 1e-8) throw geometry_error("shifted inverse contours intersect");
  }

  const int m = static_cast<int>(g.size());
  Eigen::MatrixXcd K(static_cast<int>(T) * m, static_cast<int>(T) * m);
  for (std::size_t i = 0; i < T; ++i)
    for (std::size_t j = 0; j < T; ++j) {
      const contour& ci = shifted[i];
      const contour& cj = shifted[j];
      Eigen::MatrixXcd Mw(m, m), Nm(m, m);
      for (int e = 0; e < m; ++e)
        for (int t = 0; t < m; ++t) Mw(e, t) = block_m(nu, tc, i, j, g.points[t], ci.points[e]) * g.weights[t];
      for (int t = 0; t < m; ++t)
        for (int x = 0; x < m; ++x) Nm(t, x) = block_n(tc, j, j, cj.points[x], g.points[t], opt.constants);
      Eigen::MatrixXcd blk = Mw * Nm;
      if (opt.include_h && tc.time(i) < tc.time(j))
        for (int e = 0; e < m; ++e)
          for (int x = 0; x < m; ++x) blk(e, x) += block_h(nu, tc, i, j, cj.points[x], ci.points[e], opt.constants);
      for (int x = 0; x < m; ++x) blk.col(x) *= cj.weights[x];
      K.block(static_cast<int>(i) * m, static_cast<int>(j) * m, m, m) = blk;
    }
  return det_identity_minus(K);
}

}  // namespace besselgap
