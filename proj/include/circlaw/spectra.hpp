#pragma once

#include <Eigen/Dense>

#include <vector>

#include "circlaw/linearization.hpp"
#include "circlaw/types.hpp"

namespace circlaw {

enum class WeightMode { none, blocks };
/// `svd` factors W(z,r) directly; `hermitian` diagonalizes V(z,r).
enum class SpectrumSolver { svd, hermitian };

/// Singular values of W(z,r), descending, plus per-block eigenvector mass of
/// the matching eigenpairs of V(z,r). Column k of `w_plus` belongs to the
/// eigenvalue +s_k, column k of `w_minus` to -s_k. Rows index the 2m blocks.
struct SingularSpectrum {
  Complex z{0.0, 0.0};
  double r = 0.0;
  int n = 0;
  int m = 1;
  Eigen::VectorXd values;
  Eigen::MatrixXd w_plus;
  Eigen::MatrixXd w_minus;

  bool has_weights() const { return w_plus.size() > 0; }
  Eigen::Index size() const { return values.size(); }

  /// Values are sorted; weights stay empty.
  static SingularSpectrum from_values(std::vector<double> values, int n, int m,
                                      Complex z = {0.0, 0.0}, double r = 0.0);
};

SingularSpectrum singular_spectrum(const ShiftedMatrix& S, WeightMode weights = WeightMode::none,
                                   SpectrumSolver solver = SpectrumSolver::svd);

/// F_n(x): symmetrized ESD of the +-s_j.
double esd_cdf(const SingularSpectrum& sp, double x);
/// F_n(x-).
double esd_cdf_left(const SingularSpectrum& sp, double x);

Complex empirical_stieltjes(const SingularSpectrum& sp, Complex w);
/// m_n^{(alpha)}, alpha in 1..2m.
Complex partial_trace(const SingularSpectrum& sp, int alpha, Complex w);
std::vector<Complex> partial_traces(const SingularSpectrum& sp, Complex w);

struct ComplexSpectrum {
  std::vector<Complex> eigenvalues;

  std::size_t count_in_disk(Complex center, double radius) const;
  std::size_t count_in_rect(double re_lo, double re_hi, double im_lo, double im_hi) const;
};

ComplexSpectrum product_eigenvalues(const Eigen::MatrixXd& X);
ComplexSpectrum product_eigenvalues(const Eigen::MatrixXcd& X);

struct ExtremeValues {
  double s_min = 0.0;
  double s_max = 0.0;
  bool omega_event = false;
};

/// s_max of W(z,r) stands in for the operator-norm condition.
ExtremeValues extreme_value_monitor(const SingularSpectrum& sp, double K, double threshold);

// Resolvent diagnostics by dense inversion of an explicit V.

Eigen::MatrixXcd resolvent(const Eigen::MatrixXcd& V, Complex w);

struct RowCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

RowCheck resolvent_row_check(const Eigen::MatrixXcd& V, Complex w, Eigen::Index j);

struct IdentityCheck {
  double residual = 0.0;
  double scale = 0.0;  // ||R(w1)|| * ||R(w2)|| (operator norms)
  bool holds = false;
};

IdentityCheck resolvent_identity_check(const Eigen::MatrixXcd& V, Complex w1, Complex w2);

bool descent_property_check(const Eigen::MatrixXcd& V, double u, double v, double s_factor,
                            Eigen::Index j);

}  // namespace circlaw
