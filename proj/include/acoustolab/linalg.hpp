#pragma once

// Thin wrappers around the LAPACKE divide-and-conquer SVD drivers plus a few
// dense helpers used by the kernel / resolvent code.  All matrices are
// column-major Eigen types; LAPACK overwrites its input, so the wrappers take
// copies.

#include <Eigen/Dense>
#include <complex>

namespace acoustolab::linalg {

using Eigen::MatrixXd;
using Eigen::MatrixXcd;
using Eigen::VectorXd;

struct SvdResult {
  MatrixXd u;   // left singular vectors, n x k
  VectorXd s;   // singular values, descending
  MatrixXd vt;  // right singular vectors transposed, k x m
};

struct SvdResultC {
  MatrixXcd u;
  VectorXd s;
  MatrixXcd vh;  // conjugate-transposed right vectors
};

// Full SVD (dgesdd).  Throws SolverFailure if the driver does not converge.
SvdResult svd(const MatrixXd& a);

// Singular values only (dgesdd, jobz='N').
VectorXd singular_values(const MatrixXd& a);

// Full complex SVD (zgesdd).
SvdResultC svd(const MatrixXcd& a);

VectorXd singular_values(const MatrixXcd& a);

}  // namespace acoustolab::linalg
