#include "acoustolab/linalg.hpp"

#include <lapacke.h>

#include "acoustolab/errors.hpp"

namespace acoustolab::linalg {

SvdResult svd(const MatrixXd& a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  const lapack_int m = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(n, m);
  MatrixXd work = a;
  SvdResult out;
  out.u.resize(n, k);
  out.s.resize(k);
  out.vt.resize(k, m);
  lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', n, m, work.data(), n,
                                   out.s.data(), out.u.data(), n, out.vt.data(), k);
  if (info != 0)
    throw SolverFailure("dgesdd failed, info=" + std::to_string(info));
  return out;
}

VectorXd singular_values(const MatrixXd& a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  const lapack_int m = static_cast<lapack_int>(a.cols());
  MatrixXd work = a;
  VectorXd s(std::min(n, m));
  lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', n, m, work.data(), n,
                                   s.data(), nullptr, n, nullptr, 1);
  if (info != 0)
    throw SolverFailure("dgesdd(N) failed, info=" + std::to_string(info));
  return s;
}

SvdResultC svd(const MatrixXcd& a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  const lapack_int m = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(n, m);
  MatrixXcd work = a;
  SvdResultC out;
  out.u.resize(n, k);
  out.s.resize(k);
  out.vh.resize(k, m);
  lapack_int info = LAPACKE_zgesdd(
      LAPACK_COL_MAJOR, 'S', n, m,
      reinterpret_cast<lapack_complex_double*>(work.data()), n, out.s.data(),
      reinterpret_cast<lapack_complex_double*>(out.u.data()), n,
      reinterpret_cast<lapack_complex_double*>(out.vh.data()), k);
  if (info != 0)
    throw SolverFailure("zgesdd failed, info=" + std::to_string(info));
  return out;
}

VectorXd singular_values(const MatrixXcd& a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  const lapack_int m = static_cast<lapack_int>(a.cols());
  MatrixXcd work = a;
  VectorXd s(std::min(n, m));
  lapack_int info = LAPACKE_zgesdd(
      LAPACK_COL_MAJOR, 'N', n, m,
      reinterpret_cast<lapack_complex_double*>(work.data()), n, s.data(),
      nullptr, 1, nullptr, 1);
  if (info != 0)
    throw SolverFailure("zgesdd(N) failed, info=" + std::to_string(info));
  return s;
}

}  // namespace acoustolab::linalg
