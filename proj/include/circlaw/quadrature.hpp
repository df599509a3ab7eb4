#pragma once

#include <functional>

namespace circlaw::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod (15/31). Infinite limits are accepted.
/// Throws NumericalError when the estimate is non-finite or the error
/// estimate exceeds `fail_tol` (absolute).
Result gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                     double tol = 1e-10, unsigned max_depth = 15, double fail_tol = 1e-3);

/// Double-exponential rule for integrands with endpoint singularities
/// (log, inverse square root, square-root edges).
Result tanh_sinh(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10, double fail_tol = 1e-3);

/// Nested adaptive quadrature over a polar patch around `center`:
/// int_0^radius int_0^{2 pi} f(rho, theta) rho dtheta drho.
Result polar(const std::function<double(double, double)>& f, double radius,
             double tol = 1e-8, unsigned max_depth = 12);

}  // namespace circlaw::quad
