#include "acoustolab/semigroup.hpp"

#include <cmath>
#include <limits>

#include "acoustolab/errors.hpp"
#include "acoustolab/linalg.hpp"
#include "acoustolab/sampling.hpp"

namespace acoustolab {

using Eigen::MatrixXd;

double energy(const SystemOperator& op, const VectorXd& z) {
  return 0.5 * inner_product_H(op, z, z);
}

// -- stepping -------------------------------------------------------------------

MidpointStepper::MidpointStepper(const SystemOperator& op, double dt)
    : op_(op), dt_(dt) {
  if (!(dt > 0)) throw ConfigInvalid("dt must be positive");
  SpMat id(op.n_dof, op.n_dof);
  id.setIdentity();
  lhs_ = id - (dt / 2) * op.Ad_hat;
  rhs_ = id + (dt / 2) * op.Ad_hat;
  lu_.compute(lhs_);
  if (lu_.info() != Eigen::Success)
    throw SolverFailure("midpoint factorization failed");
}

VectorXd MidpointStepper::step_hat(const VectorXd& z_hat) const {
  const VectorXd b = rhs_ * z_hat;
  VectorXd x = lu_.solve(b);
  // iterative refinement: the energy-identity budget (1e-10 relative over
  // thousands of steps) wants residuals at the eps level, not just LU-stable
  const double bn = b.norm();
  for (int pass = 0; pass < 3; ++pass) {
    const VectorXd r = b - lhs_ * x;
    if (r.norm() <= 1e-14 * bn) return x;
    x += lu_.solve(r);
  }
  if ((b - lhs_ * x).norm() > 1e-12 * bn)
    throw SolverFailure("midpoint refinement stalled");
  return x;
}

VectorXd MidpointStepper::step(const VectorXd& z) const {
  const VectorXd z_hat = op_.sqrt_w.cwiseProduct(z);
  return op_.inv_sqrt_w.cwiseProduct(step_hat(z_hat));
}

VectorXd step_midpoint(const SystemOperator& op, const VectorXd& z, double dt) {
  return MidpointStepper(op, dt).step(z);
}

Trajectory evolve(const SystemOperator& op, const VectorXd& z0, double T,
                  double dt, const KernelBasis* kernel) {
  if (!(T >= dt)) throw ConfigInvalid("evolve: T must be >= dt");
  MidpointStepper stepper(op, dt);
  const int n_steps = static_cast<int>(std::llround(T / dt));

  VectorXd z_hat = op.sqrt_w.cwiseProduct(z0);
  VectorXd equil_hat = VectorXd::Zero(op.n_dof);
  if (kernel && kernel->dim > 0)
    equil_hat = kernel->q_hat * (kernel->q_hat.transpose() * z_hat);

  Trajectory traj;
  traj.times.reserve(n_steps + 1);
  traj.energies.reserve(n_steps + 1);
  traj.damping_integrals.reserve(n_steps + 1);
  traj.residual_norms.reserve(n_steps + 1);

  double q_acc = 0.0;
  auto record = [&](int k) {
    traj.times.push_back(k * dt);
    traj.energies.push_back(0.5 * z_hat.squaredNorm());
    traj.damping_integrals.push_back(q_acc);
    traj.residual_norms.push_back((z_hat - equil_hat).norm());
  };
  record(0);
  for (int k = 1; k <= n_steps; ++k) {
    const VectorXd z_next = stepper.step_hat(z_hat);
    // exact midpoint dissipation increment (D is diagonal, same hatted)
    double diss = 0.0;
    for (int f = 0; f < op.n_u; ++f) {
      if (op.d[f] == 0.0) continue;
      const double um = 0.5 * (z_hat[f] + z_next[f]);
      diss += op.d[f] * um * um;
    }
    q_acc += dt * diss;
    z_hat = z_next;
    record(k);
  }
  return traj;
}

// -- kernel ---------------------------------------------------------------------

namespace {

constexpr double kZeroTol = 1e-10;
constexpr double kBandLo = 1e-11;
constexpr double kBandHi = 1e-9;

void check_band(const VectorXd& sigma, double sigma_max) {
  for (int i = 0; i < sigma.size(); ++i)
    if (sigma[i] >= kBandLo * sigma_max && sigma[i] <= kBandHi * sigma_max)
      throw ThresholdAmbiguous(
          "singular value " + std::to_string(sigma[i]) +
          " inside the rank-decision band [" +
          std::to_string(kBandLo * sigma_max) + ", " +
          std::to_string(kBandHi * sigma_max) + "]");
}

double estimate_norm(const SpMat& m, int iters = 40) {
  // power iteration on m^T m with a fixed seed; plenty for a threshold scale
  Rng rng(1234567);
  VectorXd v(m.cols());
  for (int i = 0; i < v.size(); ++i) v[i] = rng.normal();
  v.normalize();
  double s = 0;
  for (int it = 0; it < iters; ++it) {
    VectorXd w = m.transpose() * (m * v).eval();
    s = std::sqrt(w.norm());
    if (w.norm() == 0) return 0;
    v = w / w.norm();
  }
  return s;
}

// orthonormal basis of span(B) with the direction B*v removed (||v|| = 1):
// apply the Householder map sending e1 to +-v in coefficient space and keep
// columns 2..m.
MatrixXd deflate_direction(const MatrixXd& b, const VectorXd& v) {
  const int m = static_cast<int>(b.cols());
  VectorXd u = v;
  const double alpha = (v[0] >= 0) ? 1.0 : -1.0;
  u[0] += alpha;
  const double un = u.norm();
  if (un < 1e-12) throw SolverFailure("kernel deflation degenerate");
  u /= un;
  const VectorXd t = b * u;  // n-vector
  MatrixXd out(b.rows(), m - 1);
  for (int j = 1; j < m; ++j) out.col(j - 1) = b.col(j) - (2.0 * u[j]) * t;
  return out;
}

KernelBasis kernel_dense(const SystemOperator& op) {
  const MatrixXd ad = MatrixXd(op.Ad_hat);
  linalg::SvdResult svd = linalg::svd(ad);
  const double sigma_max = svd.s.size() ? svd.s[0] : 0.0;
  if (sigma_max == 0.0) throw SolverFailure("Ad is identically zero");
  check_band(svd.s, sigma_max);

  const int n = op.n_dof;
  int m = 0;  // count of null singular values (trailing block)
  while (m < n && svd.s[n - 1 - m] < kZeroTol * sigma_max) ++m;
  if (m == 0)
    throw SolverFailure(
        "no null directions found; the constant-r vector should always be one");

  KernelBasis kb;
  kb.sigma_max = sigma_max;
  kb.largest_kept = svd.s[n - m];                       // largest zero-class sigma
  kb.smallest_dropped = m < n ? svd.s[n - m - 1] : 0.0; // smallest nonzero sigma
  // null-space basis: last m right singular vectors
  MatrixXd b(n, m);
  for (int j = 0; j < m; ++j) b.col(j) = svd.vt.row(n - m + j).transpose();

  // the constant-r direction spans the L^2_m quotient; remove it
  VectorXd c_hat = VectorXd::Zero(n);
  for (int i = op.n_u; i < n; ++i) c_hat[i] = op.sqrt_w[i];
  c_hat.normalize();
  const VectorXd v = b.transpose() * c_hat;
  if (std::abs(v.norm() - 1.0) > 1e-8)
    throw SolverFailure(
        "constant-r direction not contained in the numerical null space "
        "(|proj| = " + std::to_string(v.norm()) + ")");
  kb.q_hat = deflate_direction(b, v);
  kb.dim = static_cast<int>(kb.q_hat.cols());
  kb.q = op.inv_sqrt_w.asDiagonal() * kb.q_hat;
  return kb;
}

KernelBasis kernel_structural(const SystemOperator& op) {
  // ker Ad = {(u, 0): V u = 0, u = 0 on damped faces} (+ the constant-r
  // direction, which the quotient removes).  Work on the divergence
  // submatrix over undamped faces, in hatted coordinates.
  std::vector<int> free_faces;
  for (int f = 0; f < op.n_u; ++f)
    if (op.d[f] == 0.0) free_faces.push_back(f);
  const int nf = static_cast<int>(free_faces.size());
  KernelBasis kb;
  kb.sigma_max = estimate_norm(op.Ad_hat);
  if (nf == 0) {
    kb.q.resize(op.n_dof, 0);
    kb.q_hat.resize(op.n_dof, 0);
    return kb;
  }

  MatrixXd m = MatrixXd::Zero(op.n_r, nf);
  const StaggeredGrid& g = op.grid;
  for (int jf = 0; jf < nf; ++jf) {
    const GridFace& fc = g.faces[free_faces[jf]];
    const int f = free_faces[jf];
    m(fc.hi, jf) = fc.flux_len / (op.sqrt_w[f] * op.sqrt_w[op.n_u + fc.hi]);
    m(fc.lo, jf) = -fc.flux_len / (op.sqrt_w[f] * op.sqrt_w[op.n_u + fc.lo]);
  }
  // need all right singular vectors: full SVD via the 'A'-like route on m^T
  // (LAPACKE 'S' on the wide matrix returns only min(n,m) of them)
  linalg::SvdResult svd = linalg::svd(m);
  const double smax = svd.s[0];
  check_band(svd.s, smax);
  const int k = static_cast<int>(svd.s.size());
  int rank = 0;
  while (rank < k && svd.s[rank] >= kZeroTol * smax) ++rank;
  kb.largest_kept = rank < k ? svd.s[rank] : 0.0;
  kb.smallest_dropped = rank > 0 ? svd.s[rank - 1] : 0.0;
  const int dim = nf - rank;
  kb.dim = dim;
  kb.q_hat = MatrixXd::Zero(op.n_dof, dim);
  if (dim > 0) {
    // null(m) = orthogonal complement of the first `rank` rows of vt.  vt
    // from the 'S' SVD is k x nf with k = min(n_r, nf) < nf when nf > n_r;
    // complete it to the full orthonormal set by QR of [vt^T | random].
    if (k >= nf) {
      for (int j = 0; j < dim; ++j) {
        const VectorXd col = svd.vt.row(rank + j).transpose();
        for (int i = 0; i < nf; ++i) kb.q_hat(free_faces[i], j) = col[i];
      }
    } else {
      // wide matrix: vt only holds the row space (first `rank` rows); the
      // null space is its orthogonal complement.  QR of the orthonormal
      // row-space basis yields Q whose trailing columns span the complement.
      MatrixXd rows = svd.vt.topRows(rank).transpose();  // nf x rank
      Eigen::HouseholderQR<MatrixXd> qr(rows);
      MatrixXd sel = MatrixXd::Zero(nf, dim);
      for (int j = 0; j < dim; ++j) sel(rank + j, j) = 1.0;
      MatrixXd comp = qr.householderQ() * sel;  // columns rank..nf-1 of Q
      for (int j = 0; j < dim; ++j)
        for (int i = 0; i < nf; ++i) kb.q_hat(free_faces[i], j) = comp(i, j);
    }
  }
  kb.q = op.inv_sqrt_w.asDiagonal() * kb.q_hat;
  return kb;
}

}  // namespace

KernelBasis kernel_basis(const SystemOperator& op, int dense_limit) {
  KernelBasis kb = op.n_dof <= dense_limit ? kernel_dense(op)
                                           : kernel_structural(op);
  op.kernel_dim = kb.dim;
  return kb;
}

Split project_PE(const SystemOperator& op, const KernelBasis& kernel,
                 const VectorXd& z) {
  Split s;
  if (kernel.dim == 0) {
    s.z_e = VectorXd::Zero(op.n_dof);
    s.z_0comp = z;
    return s;
  }
  const VectorXd z_hat = op.sqrt_w.cwiseProduct(z);
  const VectorXd coeff = kernel.q_hat.transpose() * z_hat;
  s.z_e = kernel.q * coeff;
  s.z_0comp = z - s.z_e;
  return s;
}

// -- decay fit ------------------------------------------------------------------

DecayFit fit_decay(const Trajectory& traj, double window_fraction) {
  if (traj.times.size() < 2)
    throw EmptyTrajectory("fit_decay needs at least two samples");
  const double T = traj.times.back();
  const double t_min = (1.0 - window_fraction) * T;
  std::vector<double> ts, logs;
  bool any_window = false;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    if (traj.times[k] < t_min) continue;
    any_window = true;
    if (traj.residual_norms[k] <= 1e-14) continue;  // fully decayed samples
    ts.push_back(traj.times[k]);
    logs.push_back(std::log(traj.residual_norms[k]));
  }
  DecayFit fit;
  if (!any_window || ts.size() < 2) {
    fit.degenerate = true;
    fit.c = std::numeric_limits<double>::infinity();
    fit.C = 0;
    fit.r_squared = 1.0;
    return fit;
  }
  const double n = static_cast<double>(ts.size());
  double st = 0, sl = 0, stt = 0, stl = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    st += ts[i];
    sl += logs[i];
    stt += ts[i] * ts[i];
    stl += ts[i] * logs[i];
  }
  const double denom = n * stt - st * st;
  if (denom <= 0) {
    fit.degenerate = true;
    fit.c = std::numeric_limits<double>::infinity();
    return fit;
  }
  const double slope = (n * stl - st * sl) / denom;
  const double intercept = (sl - slope * st) / n;
  fit.C = std::exp(intercept);
  fit.c = -slope;
  double ss_res = 0, ss_tot = 0;
  const double mean = sl / n;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double pred = intercept + slope * ts[i];
    ss_res += (logs[i] - pred) * (logs[i] - pred);
    ss_tot += (logs[i] - mean) * (logs[i] - mean);
  }
  fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

VectorXd make_initial_state(const SystemOperator& op, std::uint64_t seed) {
  Rng rng(seed);
  VectorXd z(op.n_dof);
  for (int i = 0; i < op.n_dof; ++i) z[i] = rng.normal();
  z.tail(op.n_r) = mean_zero_project(op, VectorXd(z.tail(op.n_r)));
  const double nrm = norm_H(op, z);
  if (nrm == 0) throw SolverFailure("degenerate initial state");
  return z / nrm;
}

}  // namespace acoustolab
