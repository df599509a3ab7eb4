#include "circlaw/linearization.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace circlaw {

void ProductModel::validate() const {
  if (factors.empty()) throw std::invalid_argument("product model: no factors");
  const auto n = factors.front().rows();
  for (std::size_t q = 0; q < factors.size(); ++q) {
    if (factors[q].rows() != n || factors[q].cols() != n) {
      throw std::invalid_argument("product model: factor " + std::to_string(q + 1) +
                                  " is not " + std::to_string(n) + "x" + std::to_string(n));
    }
  }
}

ProductModel ProductModel::sample(const EnsembleSpec& spec, std::uint64_t trial) {
  ProductModel pm;
  pm.factors.reserve(spec.m);
  for (int q = 1; q <= spec.m; ++q) pm.factors.push_back(sample_factor(spec, q, trial));
  return pm;
}

BlockLinearization BlockLinearization::build(const ProductModel& model) {
  model.validate();
  const int n = model.n(), m = model.m();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  BlockLinearization out;
  out.n_ = n;
  out.m_ = m;
  out.W_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n) * m, static_cast<Eigen::Index>(n) * m);
  for (int a = 0; a < m; ++a) {
    const int col = (a + 1) % m;
    out.W_.block(static_cast<Eigen::Index>(a) * n, static_cast<Eigen::Index>(col) * n, n, n) =
        scale * model.factors[a];
  }
  return out;
}

BlockLinearization BlockLinearization::from_matrix(Eigen::MatrixXd W, int n, int m) {
  if (W.rows() != W.cols() || W.rows() != static_cast<Eigen::Index>(n) * m) {
    throw std::invalid_argument("from_matrix: expected a square matrix of size n*m");
  }
  BlockLinearization out;
  out.W_ = std::move(W);
  out.n_ = n;
  out.m_ = m;
  return out;
}

Eigen::MatrixXd product_matrix(const ProductModel& model) {
  model.validate();
  const double scale = std::pow(static_cast<double>(model.n()), -0.5 * model.m());
  Eigen::MatrixXd x = model.factors.front();
  for (int q = 1; q < model.m(); ++q) x = x * model.factors[q];
  return scale * x;
}

Eigen::MatrixXd ShiftedMatrix::dense_real() const {
  if (!is_real()) throw std::logic_error("shifted matrix has a complex diagonal");
  Eigen::MatrixXd a = base->W();
  a.diagonal().array() -= diagonal_shift().real();
  return a;
}

Eigen::MatrixXcd ShiftedMatrix::dense() const {
  Eigen::MatrixXcd a = base->W().cast<Complex>();
  a.diagonal().array() -= diagonal_shift();
  return a;
}

ShiftedMatrix shift(std::shared_ptr<const BlockLinearization> W, Complex z, double r, Complex zeta) {
  if (!W) throw std::invalid_argument("shift: null linearization");
  if (std::abs(zeta) > 1.0) throw std::invalid_argument("shift: |zeta| must not exceed 1");
  if (r < 0.0) throw std::invalid_argument("shift: r must be non-negative");
  return {std::move(W), z, r, zeta};
}

Hermitization hermitize(const ShiftedMatrix& S) {
  const Eigen::MatrixXcd a = S.dense();
  const auto k = a.rows();
  Hermitization h;
  h.V = Eigen::MatrixXcd::Zero(2 * k, 2 * k);
  h.V.topRightCorner(k, k) = a;
  h.V.bottomLeftCorner(k, k) = a.adjoint();
  return h;
}

Complex sample_unit_disk(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double rad = std::sqrt(u(rng));
  const double th = 2.0 * std::numbers::pi * u(rng);
  return std::polar(rad, th);
}

}  // namespace circlaw
