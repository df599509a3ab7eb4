#include "circlaw/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>
#include <string>

#include "circlaw/types.hpp"

namespace circlaw::quad {

namespace {

Result checked(double value, double error, double fail_tol, const char* who) {
  if (!std::isfinite(value) || !(error <= fail_tol)) {
    throw NumericalError(std::string(who) + ": quadrature did not converge (value=" +
                         std::to_string(value) + ", error=" + std::to_string(error) + ")");
  }
  return {value, error};
}

}  // namespace

Result gauss_kronrod(const std::function<double(double)>& f, double a, double b, double tol,
                     unsigned max_depth, double fail_tol) {
  if (a == b) return {};
  double err = 0.0;
  double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, max_depth, tol,
                                                                          &err);
  return checked(v, err, fail_tol, "gauss_kronrod");
}

Result tanh_sinh(const std::function<double(double)>& f, double a, double b, double tol,
                 double fail_tol) {
  if (a == b) return {};
  static thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  double err = 0.0;
  double l1 = 0.0;
  double v = integrator.integrate(f, a, b, tol, &err, &l1);
  return checked(v, err, fail_tol, "tanh_sinh");
}

Result polar(const std::function<double(double, double)>& f, double radius, double tol,
             unsigned max_depth) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double inner_err = 0.0;
  auto ring = [&](double rho) {
    auto g = [&](double th) { return f(rho, th); };
    double e = 0.0;
    double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, 0.0, two_pi,
                                                                            max_depth, tol, &e);
    inner_err = std::max(inner_err, e);
    return v * rho;
  };
  double err = 0.0;
  double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(ring, 0.0, radius,
                                                                          max_depth, tol, &err);
  return checked(v, err + inner_err * radius, 1e-2, "polar");
}

}  // namespace circlaw::quad
