#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace circlaw {

using Complex = std::complex<double>;

/// Raised when an eigensolver or quadrature routine fails to deliver a
/// trustworthy result. Trial-level callers treat it as "discard and count".
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// sqrt(2) + 1, the constant of the smoothing inequality.
inline constexpr double kSmoothingA = 2.414213562373095048801688724209698;

}  // namespace circlaw
