#pragma once

#include <stdexcept>
#include <string>

namespace besselgap {

inline constexpr double pi = 3.141592653589793238462643383279502884;

struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

struct convergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct geometry_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct singularity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bessel order and tolerances shared by the determinant engines.
struct model_params {
  double nu = 0.0;
  double det_tol = 1e-10;
  double ode_rtol = 1e-10;
  double ode_atol = 1e-12;
};

inline void require_order(double nu) {
  if (!(nu > -1.0)) throw domain_error("Bessel order must satisfy nu > -1, got " + std::to_string(nu));
}

}  // namespace besselgap
