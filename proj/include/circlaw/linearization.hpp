#pragma once

#include <Eigen/Dense>

#include <memory>
#include <random>
#include <vector>

#include "circlaw/ensembles.hpp"
#include "circlaw/types.hpp"

namespace circlaw {

struct ProductModel {
  std::vector<Eigen::MatrixXd> factors;

  int n() const { return factors.empty() ? 0 : static_cast<int>(factors.front().rows()); }
  int m() const { return static_cast<int>(factors.size()); }
  void validate() const;

  static ProductModel sample(const EnsembleSpec& spec, std::uint64_t trial);
};

/// nm x nm block-cyclic matrix: block (a, a+1) = X_a / sqrt(n) for a < m,
/// block (m, 1) = X_m / sqrt(n).
class BlockLinearization {
 public:
  static BlockLinearization build(const ProductModel& model);
  /// Wraps an arbitrary square matrix; used for hand-built cases.
  static BlockLinearization from_matrix(Eigen::MatrixXd W, int n, int m);

  const Eigen::MatrixXd& W() const { return W_; }
  int n() const { return n_; }
  int m() const { return m_; }
  Eigen::Index dim() const { return W_.rows(); }

 private:
  Eigen::MatrixXd W_;
  int n_ = 0;
  int m_ = 0;
};

/// n^{-m/2} X_1 ... X_m.
Eigen::MatrixXd product_matrix(const ProductModel& model);

/// W - r*zeta*I - z*I.
struct ShiftedMatrix {
  std::shared_ptr<const BlockLinearization> base;
  Complex z{0.0, 0.0};
  double r = 0.0;
  Complex zeta{0.0, 0.0};

  Complex diagonal_shift() const { return z + r * zeta; }
  bool is_real() const { return diagonal_shift().imag() == 0.0; }
  int n() const { return base->n(); }
  int m() const { return base->m(); }
  Eigen::MatrixXd dense_real() const;
  Eigen::MatrixXcd dense() const;
};

ShiftedMatrix shift(std::shared_ptr<const BlockLinearization> W, Complex z, double r = 0.0,
                    Complex zeta = {0.0, 0.0});

/// [[0, W(z,r)], [W(z,r)^*, 0]].
struct Hermitization {
  Eigen::MatrixXcd V;
};

Hermitization hermitize(const ShiftedMatrix& S);

Complex sample_unit_disk(std::mt19937_64& rng);

}  // namespace circlaw
