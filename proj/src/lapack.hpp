#pragma once

#include <Eigen/Dense>

namespace circlaw::lapack {

// Thin wrappers over LAPACKE. Inputs are taken by value because the
// routines destroy them.

Eigen::VectorXd singular_values(Eigen::MatrixXd a);
Eigen::VectorXd singular_values(Eigen::MatrixXcd a);

// Thin SVD a = U diag(s) Vt with s descending.
void svd(Eigen::MatrixXd a, Eigen::VectorXd& s, Eigen::MatrixXd& u, Eigen::MatrixXd& vt);
void svd(Eigen::MatrixXcd a, Eigen::VectorXd& s, Eigen::MatrixXcd& u, Eigen::MatrixXcd& vh);

// Ascending eigenvalues of a symmetric / Hermitian matrix (lower triangle read).
Eigen::VectorXd sym_eigenvalues(Eigen::MatrixXd a);
Eigen::VectorXd herm_eigenvalues(Eigen::MatrixXcd a);
// Eigenvectors overwrite `a` column-wise.
Eigen::VectorXd sym_eigensystem(Eigen::MatrixXd& a);
Eigen::VectorXd herm_eigensystem(Eigen::MatrixXcd& a);

Eigen::VectorXcd general_eigenvalues(Eigen::MatrixXd a);
Eigen::VectorXcd general_eigenvalues(Eigen::MatrixXcd a);

}  // namespace circlaw::lapack
