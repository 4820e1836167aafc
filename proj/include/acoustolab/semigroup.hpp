#pragma once

// Time evolution Z' = Ad Z by the implicit midpoint rule, energy bookkeeping,
// the kernel of Ad (equilibria) and the decay-rate fit.
//
// The midpoint step makes the energy identity an algebraic fact:
//   E(Z_{k+1}) - E(Z_k) = -dt * ||sqrt(b) u_mid||^2   with u_mid = (u_k+u_{k+1})/2,
// so trajectories carry the dissipated energy Q_k accumulated from exactly
// those midpoints and the identity E_0 - E_k = Q_k holds to solver precision.

#include <Eigen/SparseLU>

#include "acoustolab/operators.hpp"

namespace acoustolab {

struct Trajectory {
  std::vector<double> times;
  std::vector<double> energies;           // E_k
  std::vector<double> damping_integrals;  // Q_k = sum_{j<k} dt ||sqrt(b) u_mid,j||^2
  std::vector<double> residual_norms;     // ||Z_k - P_E Z_0||_H
};

// Basis of E = ker Ad in H: divergence-free velocity fields vanishing on
// {b>0} faces, r = 0.  (The constant-r direction is excluded: states live in
// L^2_m.)  Columns are H-orthonormal.
struct KernelBasis {
  Eigen::MatrixXd q;        // n_dof x dim, natural coordinates
  Eigen::MatrixXd q_hat;    // W^{1/2} q, l2-orthonormal
  int dim = 0;
  double sigma_max = 0;       // largest singular value of Ad_hat
  double largest_kept = 0;    // largest sigma classified as zero
  double smallest_dropped = 0;  // smallest sigma classified as nonzero
};

double energy(const SystemOperator& op, const VectorXd& z);

// One factorization of (I - dt/2 Ad_hat) reused across steps; step() performs
// the solve plus iterative refinement.  Works in hatted coordinates.
class MidpointStepper {
 public:
  MidpointStepper(const SystemOperator& op, double dt);
  // advances z (natural coordinates) by one step
  VectorXd step(const VectorXd& z) const;
  // hatted-coordinate step, used by evolve to avoid round trips
  VectorXd step_hat(const VectorXd& z_hat) const;
  double dt() const { return dt_; }

 private:
  const SystemOperator& op_;
  double dt_;
  SpMat lhs_, rhs_;
  Eigen::SparseLU<SpMat> lu_;
};

VectorXd step_midpoint(const SystemOperator& op, const VectorXd& z, double dt);

// Evolves Z0 over [0,T]; records E_k, Q_k and residual norms at every step.
// Residuals are measured against P_E Z0 when a kernel is supplied, against 0
// otherwise (empty kernel).  Z0 should have weighted-mean-zero r (see
// make_initial_state); the constant-r component, if any, is preserved by the
// flow and would bias residuals.
Trajectory evolve(const SystemOperator& op, const VectorXd& z0, double T,
                  double dt, const KernelBasis* kernel = nullptr);

// Numerical null space of Ad, threshold sigma < 1e-10 * sigma_max.  Dense SVD
// of Ad_hat for n_dof <= dense_limit; otherwise the structural path: the
// kernel characterization (div u = 0, u = 0 on damped faces, r = 0) reduces
// the problem to the null space of the divergence submatrix over undamped
// faces, which is what gets the dense SVD.  Throws ThresholdAmbiguous if any
// singular value falls in [1e-11, 1e-9] * sigma_max.
KernelBasis kernel_basis(const SystemOperator& op, int dense_limit = 6000);

struct Split {
  VectorXd z_e;      // component in E
  VectorXd z_0comp;  // component in H_0 = E-perp
};
Split project_PE(const SystemOperator& op, const KernelBasis& kernel,
                 const VectorXd& z);

struct DecayFit {
  double C = 0;
  double c = 0;
  double r_squared = 0;
  bool degenerate = false;  // all residuals below 1e-14; c = +inf sentinel
};

// Least-squares line on (t, log residual) over the window t >= (1-wf)*T.
DecayFit fit_decay(const Trajectory& traj, double window_fraction = 0.75);

// Seeded random initial state: unit H-norm (E = 1/2), r weighted-mean-zero.
VectorXd make_initial_state(const SystemOperator& op, std::uint64_t seed);

}  // namespace acoustolab
