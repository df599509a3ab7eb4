#include "circlaw/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lapack.hpp"

namespace circlaw {

namespace {

void require_upper(Complex w, const char* who) {
  if (!(w.imag() > 0.0)) throw std::invalid_argument(std::string(who) + ": Im w must be positive");
}

// Column k of the result: squared mass of column k of `u` in each n-row block.
template <class M>
Eigen::MatrixXd block_mass(const M& u, int n, int blocks) {
  Eigen::MatrixXd out(blocks, u.cols());
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    for (int a = 0; a < blocks; ++a) {
      out(a, k) = u.col(k).segment(static_cast<Eigen::Index>(a) * n, n).squaredNorm();
    }
  }
  return out;
}

template <class Mat>
void fill_from_svd(SingularSpectrum& sp, const Mat& a, WeightMode weights) {
  if (weights == WeightMode::none) {
    sp.values = lapack::singular_values(a);
    return;
  }
  Mat u, vh;
  lapack::svd(a, sp.values, u, vh);
  const int m = sp.m;
  // eigenvectors of V for +-s_k are [u_k; +-v_k] / sqrt(2)
  Eigen::MatrixXd top = 0.5 * block_mass(u, sp.n, m);
  Eigen::MatrixXd bottom = 0.5 * block_mass(vh.adjoint(), sp.n, m);
  sp.w_plus.resize(2 * m, sp.values.size());
  sp.w_plus.topRows(m) = top;
  sp.w_plus.bottomRows(m) = bottom;
  sp.w_minus = sp.w_plus;
}

template <class Mat>
void fill_from_hermitian(SingularSpectrum& sp, Mat v, WeightMode weights) {
  const Eigen::Index N = v.rows() / 2;
  Eigen::VectorXd lam;
  if (weights == WeightMode::none) {
    if constexpr (std::is_same_v<Mat, Eigen::MatrixXd>) lam = lapack::sym_eigenvalues(std::move(v));
    else lam = lapack::herm_eigenvalues(std::move(v));
  } else {
    if constexpr (std::is_same_v<Mat, Eigen::MatrixXd>) lam = lapack::sym_eigensystem(v);
    else lam = lapack::herm_eigensystem(v);
  }
  sp.values.resize(N);
  for (Eigen::Index j = 0; j < N; ++j) {
    sp.values[j] = std::max(0.0, 0.5 * (lam[2 * N - 1 - j] - lam[j]));
  }
  if (weights == WeightMode::none) return;
  const Eigen::MatrixXd mass = block_mass(v, sp.n, 2 * sp.m);
  sp.w_plus.resize(2 * sp.m, N);
  sp.w_minus.resize(2 * sp.m, N);
  for (Eigen::Index j = 0; j < N; ++j) {
    sp.w_plus.col(j) = mass.col(2 * N - 1 - j);
    sp.w_minus.col(j) = mass.col(j);
  }
}

}  // namespace

SingularSpectrum SingularSpectrum::from_values(std::vector<double> values, int n, int m, Complex z,
                                               double r) {
  std::sort(values.begin(), values.end(), std::greater<>());
  SingularSpectrum sp;
  sp.z = z;
  sp.r = r;
  sp.n = n;
  sp.m = m;
  sp.values = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  return sp;
}

SingularSpectrum singular_spectrum(const ShiftedMatrix& S, WeightMode weights,
                                   SpectrumSolver solver) {
  SingularSpectrum sp;
  sp.z = S.z;
  sp.r = S.r;
  sp.n = S.n();
  sp.m = S.m();
  if (solver == SpectrumSolver::svd) {
    if (S.is_real()) fill_from_svd(sp, S.dense_real(), weights);
    else fill_from_svd(sp, S.dense(), weights);
  } else if (S.is_real()) {
    const Eigen::MatrixXd a = S.dense_real();
    const auto k = a.rows();
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(2 * k, 2 * k);
    v.topRightCorner(k, k) = a;
    v.bottomLeftCorner(k, k) = a.transpose();
    fill_from_hermitian(sp, std::move(v), weights);
  } else {
    fill_from_hermitian(sp, hermitize(S).V, weights);
  }
  if (!sp.values.allFinite()) throw NumericalError("singular_spectrum: non-finite singular values");
  return sp;
}

double esd_cdf(const SingularSpectrum& sp, double x) {
  const Eigen::Index N = sp.size();
  if (N == 0) return 0.0;
  Eigen::Index count = 0;
  for (Eigen::Index j = 0; j < N; ++j) {
    const double s = sp.values[j];
    count += (s <= x) + (-s <= x);
  }
  return static_cast<double>(count) / (2.0 * static_cast<double>(N));
}

double esd_cdf_left(const SingularSpectrum& sp, double x) {
  const Eigen::Index N = sp.size();
  if (N == 0) return 0.0;
  Eigen::Index count = 0;
  for (Eigen::Index j = 0; j < N; ++j) {
    const double s = sp.values[j];
    count += (s < x) + (-s < x);
  }
  return static_cast<double>(count) / (2.0 * static_cast<double>(N));
}

Complex empirical_stieltjes(const SingularSpectrum& sp, Complex w) {
  require_upper(w, "empirical_stieltjes");
  Complex acc = 0.0;
  const Complex w2 = w * w;
  for (Eigen::Index j = 0; j < sp.size(); ++j) {
    const double s = sp.values[j];
    acc += w / (s * s - w2);
  }
  return acc / static_cast<double>(sp.size());
}

Complex partial_trace(const SingularSpectrum& sp, int alpha, Complex w) {
  require_upper(w, "partial_trace");
  if (alpha < 1 || alpha > 2 * sp.m) {
    throw std::invalid_argument("partial_trace: alpha must lie in 1.." + std::to_string(2 * sp.m));
  }
  if (!sp.has_weights()) throw std::logic_error("partial_trace: spectrum has no block weights");
  Complex acc = 0.0;
  for (Eigen::Index k = 0; k < sp.size(); ++k) {
    const double s = sp.values[k];
    acc += sp.w_plus(alpha - 1, k) / (s - w) + sp.w_minus(alpha - 1, k) / (-s - w);
  }
  return acc / static_cast<double>(sp.n);
}

std::vector<Complex> partial_traces(const SingularSpectrum& sp, Complex w) {
  std::vector<Complex> out;
  out.reserve(2 * sp.m);
  for (int a = 1; a <= 2 * sp.m; ++a) out.push_back(partial_trace(sp, a, w));
  return out;
}

std::size_t ComplexSpectrum::count_in_disk(Complex center, double radius) const {
  return static_cast<std::size_t>(std::count_if(eigenvalues.begin(), eigenvalues.end(),
                                                [&](Complex l) { return std::abs(l - center) <= radius; }));
}

std::size_t ComplexSpectrum::count_in_rect(double re_lo, double re_hi, double im_lo,
                                           double im_hi) const {
  return static_cast<std::size_t>(std::count_if(eigenvalues.begin(), eigenvalues.end(), [&](Complex l) {
    return l.real() >= re_lo && l.real() <= re_hi && l.imag() >= im_lo && l.imag() <= im_hi;
  }));
}

ComplexSpectrum product_eigenvalues(const Eigen::MatrixXd& X) {
  if (X.rows() != X.cols()) throw std::invalid_argument("product_eigenvalues: matrix not square");
  const Eigen::VectorXcd ev = lapack::general_eigenvalues(X);
  return {std::vector<Complex>(ev.data(), ev.data() + ev.size())};
}

ComplexSpectrum product_eigenvalues(const Eigen::MatrixXcd& X) {
  if (X.rows() != X.cols()) throw std::invalid_argument("product_eigenvalues: matrix not square");
  const Eigen::VectorXcd ev = lapack::general_eigenvalues(X);
  return {std::vector<Complex>(ev.data(), ev.data() + ev.size())};
}

ExtremeValues extreme_value_monitor(const SingularSpectrum& sp, double K, double threshold) {
  if (sp.size() == 0) return {};
  ExtremeValues ev;
  ev.s_max = sp.values.maxCoeff();
  ev.s_min = sp.values.minCoeff();
  ev.omega_event = ev.s_min >= threshold && ev.s_min > 0.0 && ev.s_max <= K;
  return ev;
}

Eigen::MatrixXcd resolvent(const Eigen::MatrixXcd& V, Complex w) {
  require_upper(w, "resolvent");
  Eigen::MatrixXcd a = V;
  a.diagonal().array() -= w;
  return a.partialPivLu().inverse();
}

RowCheck resolvent_row_check(const Eigen::MatrixXcd& V, Complex w, Eigen::Index j) {
  if (j < 0 || j >= V.rows()) throw std::out_of_range("resolvent_row_check: bad index");
  const Eigen::MatrixXcd R = resolvent(V, w);
  RowCheck rc;
  rc.lhs = R.row(j).squaredNorm();
  rc.rhs = R(j, j).imag() / w.imag();
  rc.holds = rc.lhs <= rc.rhs + 1e-10;
  return rc;
}

IdentityCheck resolvent_identity_check(const Eigen::MatrixXcd& V, Complex w1, Complex w2) {
  const Eigen::MatrixXcd R1 = resolvent(V, w1);
  const Eigen::MatrixXcd R2 = resolvent(V, w2);
  const Eigen::MatrixXcd diff = R1 - R2 - (w1 - w2) * (R1 * R2);
  IdentityCheck ic;
  ic.residual = diff.cwiseAbs().maxCoeff();
  Eigen::JacobiSVD<Eigen::MatrixXcd> s1(R1), s2(R2);
  ic.scale = s1.singularValues()[0] * s2.singularValues()[0];
  ic.holds = ic.residual <= 1e-10 * ic.scale;
  return ic;
}

bool descent_property_check(const Eigen::MatrixXcd& V, double u, double v, double s_factor,
                            Eigen::Index j) {
  if (s_factor < 1.0) throw std::invalid_argument("descent_property_check: s_factor < 1");
  if (!(v > 0.0)) throw std::invalid_argument("descent_property_check: v must be positive");
  const Complex hi = resolvent(V, {u, v})(j, j);
  const Complex lo = resolvent(V, {u, v / s_factor})(j, j);
  constexpr double slack = 1.0 + 1e-12;
  return std::abs(lo) <= s_factor * std::abs(hi) * slack &&
         lo.imag() <= s_factor * hi.imag() * slack;
}

}  // namespace circlaw
