#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "config.hpp"

namespace besselgap {

enum class rule_kind { gauss_legendre, gauss_jacobi, gauss_laguerre };

struct quadrature_rule {
  std::vector<double> nodes;
  std::vector<double> weights;
  rule_kind kind = rule_kind::gauss_legendre;
  double alpha = 0.0;

  std::size_t size() const { return nodes.size(); }

  template <class F>
  auto integrate(F&& f) const {
    decltype(f(nodes[0]) * weights[0]) sum{};
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

inline quadrature_rule gauss_legendre(int n) {
  if (n < 1 || n > 4096) throw domain_error("gauss_legendre: n must be in [1, 4096]");
  quadrature_rule r;
  r.nodes.assign(n, 0.0);
  r.weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.nodes[i] = -z;
    r.nodes[n - 1 - i] = z;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

inline quadrature_rule map_to_interval(const quadrature_rule& rule, double lo, double hi) {
  if (!(hi > lo)) throw domain_error("map_to_interval: degenerate interval");
  quadrature_rule r = rule;
  const double half = 0.5 * (hi - lo);
  for (std::size_t i = 0; i < r.size(); ++i) {
    r.nodes[i] = lo + half * (rule.nodes[i] + 1.0);
    r.weights[i] = half * rule.weights[i];
  }
  return r;
}

namespace detail {

// Golub-Welsch for a symmetric tridiagonal Jacobi matrix.
inline quadrature_rule golub_welsch(const std::vector<double>& diag, const std::vector<double>& offdiag, double mu0) {
  const int n = static_cast<int>(diag.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) J(i, i) = diag[i];
  for (int i = 0; i + 1 < n; ++i) J(i, i + 1) = J(i + 1, i) = offdiag[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  quadrature_rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = es.eigenvalues()(i);
    const double v = es.eigenvectors()(0, i);
    r.weights[i] = mu0 * v * v;
  }
  return r;
}

}  // namespace detail

// Nodes and weights for the weight (1-t)^alpha (1+t)^beta on [-1, 1].
inline quadrature_rule gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1 || n > 4096) throw domain_error("gauss_jacobi: n must be in [1, 4096]");
  if (!(alpha > -1.0 && beta > -1.0)) throw domain_error("gauss_jacobi: exponents must exceed -1");
  std::vector<double> d(n), e(n > 1 ? n - 1 : 0);
  const double ab = alpha + beta;
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + ab;
    d[k] = (k == 0) ? (beta - alpha) / (ab + 2.0) : (beta * beta - alpha * alpha) / (s * (s + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + ab;
    const double num = 4.0 * k * (k + alpha) * (k + beta) * (k + ab);
    const double den = s * s * (s + 1.0) * (s - 1.0);
    e[k - 1] = std::sqrt(num / den);
  }
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) -
                              std::lgamma(ab + 2.0));
  quadrature_rule r = detail::golub_welsch(d, e, mu0);
  r.kind = rule_kind::gauss_jacobi;
  r.alpha = alpha;
  return r;
}

// Rule for the integral over [lo, hi] of (s - lo)^alpha f(s) ds; the power is part of the weights.
inline quadrature_rule jacobi_left(int n, double alpha, double lo, double hi) {
  if (!(hi > lo)) throw domain_error("jacobi_left: degenerate interval");
  quadrature_rule base = gauss_jacobi(n, 0.0, alpha);
  quadrature_rule r = base;
  const double half = 0.5 * (hi - lo);
  const double scale = std::pow(half, alpha + 1.0);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = lo + half * (base.nodes[i] + 1.0);
    r.weights[i] = scale * base.weights[i];
  }
  return r;
}

inline quadrature_rule gauss_laguerre(int n) {
  if (n < 1 || n > 4096) throw domain_error("gauss_laguerre: n must be in [1, 4096]");
  std::vector<double> d(n), e(n > 1 ? n - 1 : 0);
  for (int k = 0; k < n; ++k) d[k] = 2.0 * k + 1.0;
  for (int k = 1; k < n; ++k) e[k - 1] = k;
  quadrature_rule r = detail::golub_welsch(d, e, 1.0);
  r.kind = rule_kind::gauss_laguerre;
  return r;
}

// Integral over [1, inf) of f(u) e^{-decay (u-1)} du; the exponential is part of the weights.
inline quadrature_rule laguerre_tail(int n, double decay) {
  if (!(decay > 0.0)) throw domain_error("laguerre_tail: decay must be positive");
  quadrature_rule r = gauss_laguerre(n);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = 1.0 + r.nodes[i] / decay;
    r.weights[i] /= decay;
  }
  return r;
}

// Concatenation of one mapped Gauss-Legendre rule per panel.
inline quadrature_rule composite_legendre(int n, const std::vector<double>& breaks) {
  if (breaks.size() < 2) throw domain_error("composite_legendre: need at least two breakpoints");
  const quadrature_rule base = gauss_legendre(n);
  quadrature_rule out;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const quadrature_rule r = map_to_interval(base, breaks[p], breaks[p + 1]);
    out.nodes.insert(out.nodes.end(), r.nodes.begin(), r.nodes.end());
    out.weights.insert(out.weights.end(), r.weights.begin(), r.weights.end());
  }
  return out;
}

}  // namespace besselgap
