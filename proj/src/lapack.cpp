#include "lapack.hpp"

#include <lapacke.h>

#include <string>

#include "circlaw/types.hpp"

namespace circlaw::lapack {

namespace {

void ensure(lapack_int info, const char* routine) {
  if (info != 0) {
    throw NumericalError(std::string(routine) + " failed with info=" + std::to_string(info));
  }
}

lapack_int dim(Eigen::Index k) { return static_cast<lapack_int>(k); }

lapack_complex_double* zptr(std::complex<double>* p) {
  return reinterpret_cast<lapack_complex_double*>(p);
}

}  // namespace

Eigen::VectorXd singular_values(Eigen::MatrixXd a) {
  const lapack_int m = dim(a.rows()), n = dim(a.cols());
  Eigen::VectorXd s(std::min(m, n));
  if (s.size() == 0) return s;
  ensure(LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', m, n, a.data(), m, s.data(), nullptr, 1, nullptr, 1),
         "dgesdd");
  return s;
}

Eigen::VectorXd singular_values(Eigen::MatrixXcd a) {
  const lapack_int m = dim(a.rows()), n = dim(a.cols());
  Eigen::VectorXd s(std::min(m, n));
  if (s.size() == 0) return s;
  ensure(LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, zptr(a.data()), m, s.data(), nullptr, 1,
                        nullptr, 1),
         "zgesdd");
  return s;
}

void svd(Eigen::MatrixXd a, Eigen::VectorXd& s, Eigen::MatrixXd& u, Eigen::MatrixXd& vt) {
  const lapack_int m = dim(a.rows()), n = dim(a.cols());
  const lapack_int k = std::min(m, n);
  s.resize(k);
  u.resize(m, k);
  vt.resize(k, n);
  ensure(LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', m, n, a.data(), m, s.data(), u.data(), m,
                        vt.data(), k),
         "dgesdd");
}

void svd(Eigen::MatrixXcd a, Eigen::VectorXd& s, Eigen::MatrixXcd& u, Eigen::MatrixXcd& vh) {
  const lapack_int m = dim(a.rows()), n = dim(a.cols());
  const lapack_int k = std::min(m, n);
  s.resize(k);
  u.resize(m, k);
  vh.resize(k, n);
  ensure(LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', m, n, zptr(a.data()), m, s.data(), zptr(u.data()),
                        m, zptr(vh.data()), k),
         "zgesdd");
}

Eigen::VectorXd sym_eigenvalues(Eigen::MatrixXd a) {
  const lapack_int n = dim(a.rows());
  Eigen::VectorXd w(n);
  ensure(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, a.data(), n, w.data()), "dsyevd");
  return w;
}

Eigen::VectorXd herm_eigenvalues(Eigen::MatrixXcd a) {
  const lapack_int n = dim(a.rows());
  Eigen::VectorXd w(n);
  ensure(LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, zptr(a.data()), n, w.data()), "zheevd");
  return w;
}

Eigen::VectorXd sym_eigensystem(Eigen::MatrixXd& a) {
  const lapack_int n = dim(a.rows());
  Eigen::VectorXd w(n);
  ensure(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, w.data()), "dsyevd");
  return w;
}

Eigen::VectorXd herm_eigensystem(Eigen::MatrixXcd& a) {
  const lapack_int n = dim(a.rows());
  Eigen::VectorXd w(n);
  ensure(LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, zptr(a.data()), n, w.data()), "zheevd");
  return w;
}

Eigen::VectorXcd general_eigenvalues(Eigen::MatrixXd a) {
  const lapack_int n = dim(a.rows());
  Eigen::VectorXd wr(n), wi(n);
  ensure(LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, wr.data(), wi.data(), nullptr,
                       1, nullptr, 1),
         "dgeev");
  Eigen::VectorXcd out(n);
  for (lapack_int i = 0; i < n; ++i) out[i] = {wr[i], wi[i]};
  return out;
}

Eigen::VectorXcd general_eigenvalues(Eigen::MatrixXcd a) {
  const lapack_int n = dim(a.rows());
  Eigen::VectorXcd w(n);
  ensure(LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, zptr(a.data()), n, zptr(w.data()), nullptr,
                       1, nullptr, 1),
         "zgeev");
  return w;
}

}  // namespace circlaw::lapack
