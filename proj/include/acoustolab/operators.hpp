#pragma once

// Discrete operators on the staggered grid.  State layout: the first n_u
// entries are face velocity components, the last n_r entries are cell scalars.
//
//   A  = [[0, G], [V, 0]]   discrete (0 grad; div 0), skew-adjoint in H
//   D  = diag(b at faces, 0 at cells)
//   Ad = -A - D
//
// H-inner product: <z,w>_H = sum_i w_i z_i w_i with face weights
// (flux_len * spacing) and cell areas.  Adjointness <G r, u>_H = -<r, V u>_H
// holds by construction of the weights.  For numerical work we also carry the
// symmetrized ("hatted") operator Ad_hat = W^{1/2} Ad W^{-1/2}, whose skew
// part is assembled entrywise antisymmetric, i.e. bitwise skew.

#include <Eigen/Sparse>
#include <complex>
#include <optional>

#include "acoustolab/grid.hpp"

namespace acoustolab {

using SpMat = Eigen::SparseMatrix<double>;
using SpMatC = Eigen::SparseMatrix<std::complex<double>>;
using Eigen::VectorXcd;
using Eigen::VectorXd;

struct SystemOperator {
  SystemOperator(StaggeredGrid g, DampingField b)
      : grid(std::move(g)), damping(std::move(b)) {}

  StaggeredGrid grid;
  DampingField damping;
  int n_u = 0, n_r = 0, n_dof = 0;

  SpMat A;          // skew in H
  VectorXd d;       // damping diagonal (zero on cells)
  SpMat Ad;         // -A - diag(d)
  VectorXd w;       // H weights
  VectorXd sqrt_w, inv_sqrt_w;
  SpMat Ad_hat;     // W^{1/2} Ad W^{-1/2}

  // filled by kernel_basis; mutable cache, set once before concurrent use
  mutable std::optional<int> kernel_dim;

  Eigen::Ref<const VectorXd> u_part(const VectorXd& z) const { return z.head(n_u); }
  Eigen::Ref<const VectorXd> r_part(const VectorXd& z) const { return z.tail(n_r); }
};

SystemOperator assemble(const Domain& domain, Resolution res,
                        const DampingField& b);

double inner_product_H(const SystemOperator& op, const VectorXd& z,
                       const VectorXd& v);
std::complex<double> inner_product_H(const SystemOperator& op,
                                     const VectorXcd& z, const VectorXcd& v);
double norm_H(const SystemOperator& op, const VectorXd& z);
double norm_H(const SystemOperator& op, const VectorXcd& z);

// r' = r - weighted mean(r); input is the r block only (length n_r)
VectorXd mean_zero_project(const SystemOperator& op, const VectorXd& r);

// H-norms of the velocity / pressure blocks of a full state
double u_norm_H(const SystemOperator& op, const VectorXcd& z);
double r_norm_H(const SystemOperator& op, const VectorXcd& z);

}  // namespace acoustolab
