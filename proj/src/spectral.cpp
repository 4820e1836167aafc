#include "acoustolab/spectral.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "acoustolab/errors.hpp"
#include "acoustolab/linalg.hpp"
#include "acoustolab/parallel.hpp"
#include "acoustolab/sampling.hpp"

namespace acoustolab {

using cd = std::complex<double>;
using Eigen::MatrixXd;
using Eigen::MatrixXcd;

namespace {

constexpr double kSingularTol = 1e-13;

double ad_norm_estimate(const SpMat& m) {
  Rng rng(987654321);
  VectorXd v(m.cols());
  for (int i = 0; i < v.size(); ++i) v[i] = rng.normal();
  v.normalize();
  double lam = 0;
  for (int it = 0; it < 40; ++it) {
    VectorXd w = m.transpose() * (m * v).eval();
    lam = w.norm();
    if (lam == 0) return 0;
    v = w / lam;
  }
  return std::sqrt(lam);
}

}  // namespace

struct ResolventSolver::Impl {
  MatrixXd n_hat;          // deflation basis: [kernel q_hat | const-r], n x (k+1)
  SpMatC c_base;           // Ad_hat with an explicit (zero-filled) diagonal
  std::vector<int> diag_pos;
  double ad_norm = 0;

  // dense backend cache (built lazily on first dense call)
  mutable std::optional<MatrixXd> basis;       // B: n x m, H_0 basis
  mutable std::optional<MatrixXd> restricted;  // B^T Ad_hat B

  void build_dense(const SystemOperator& op) const {
    if (restricted) return;
    const int n = op.n_dof;
    const int k1 = static_cast<int>(n_hat.cols());
    const int m = n - k1;
    Eigen::HouseholderQR<MatrixXd> qr(n_hat);
    MatrixXd sel = MatrixXd::Zero(n, m);
    for (int j = 0; j < m; ++j) sel(k1 + j, j) = 1.0;
    basis = qr.householderQ() * sel;
    restricted = basis->transpose() * (op.Ad_hat * (*basis)).eval();
  }

  // project a complex vector onto the orthogonal complement of N
  void deflate(VectorXcd& v) const {
    const VectorXd cr = n_hat.transpose() * v.real();
    const VectorXd ci = n_hat.transpose() * v.imag();
    v.real() -= n_hat * cr;
    v.imag() -= n_hat * ci;
  }

  SpMatC matrix_at(double mu) const {
    SpMatC c = c_base;
    cd* vals = c.valuePtr();
    for (std::size_t j = 0; j < diag_pos.size(); ++j)
      vals[diag_pos[j]] -= cd(0.0, mu);
    return c;
  }
};

ResolventSolver::ResolventSolver(const SystemOperator& op,
                                 const KernelBasis& kernel)
    : op_(op), kernel_(kernel), impl_(new Impl) {
  const int n = op.n_dof;
  impl_->n_hat.resize(n, kernel.dim + 1);
  if (kernel.dim > 0) impl_->n_hat.leftCols(kernel.dim) = kernel.q_hat;
  VectorXd c_hat = VectorXd::Zero(n);
  for (int i = op.n_u; i < n; ++i) c_hat[i] = op.sqrt_w[i];
  c_hat.normalize();
  impl_->n_hat.col(kernel.dim) = c_hat;
  restricted_dim_ = n - (kernel.dim + 1);
  if (restricted_dim_ <= 0)
    throw SolverFailure("H_0 is trivial: kernel spans the whole space");

  std::vector<Eigen::Triplet<cd>> t;
  t.reserve(op.Ad_hat.nonZeros() + n);
  for (int j = 0; j < op.Ad_hat.outerSize(); ++j)
    for (SpMat::InnerIterator it(op.Ad_hat, j); it; ++it)
      t.emplace_back(it.row(), it.col(), cd(it.value(), 0.0));
  for (int i = 0; i < n; ++i) t.emplace_back(i, i, cd(0.0, 0.0));
  impl_->c_base.resize(n, n);
  impl_->c_base.setFromTriplets(t.begin(), t.end());
  impl_->c_base.makeCompressed();
  impl_->diag_pos.resize(n);
  for (int j = 0; j < n; ++j) {
    bool found = false;
    for (int p = impl_->c_base.outerIndexPtr()[j];
         p < impl_->c_base.outerIndexPtr()[j + 1]; ++p)
      if (impl_->c_base.innerIndexPtr()[p] == j) {
        impl_->diag_pos[j] = p;
        found = true;
        break;
      }
    if (!found) throw SolverFailure("diagonal entry missing");
  }
  impl_->ad_norm = ad_norm_estimate(op.Ad_hat);
}

ResolventSolver::~ResolventSolver() = default;

namespace {

struct MinPair {
  double sigma = 0;   // smallest singular value on H_0
  VectorXcd y_hat;    // corresponding right singular vector (hatted), unit
};

// dense backend: full SVD of the restricted matrix
MinPair dense_min_pair(const ResolventSolver::Impl& impl, double mu,
                       bool want_vector) {
  const MatrixXd& r = *impl.restricted;
  const int m = static_cast<int>(r.rows());
  MatrixXcd c = r.cast<cd>();
  for (int i = 0; i < m; ++i) c(i, i) -= cd(0.0, mu);
  MinPair out;
  if (!want_vector) {
    const VectorXd s = linalg::singular_values(c);
    if (s[m - 1] < kSingularTol * s[0])
      throw SingularAtMu("sigma_min " + std::to_string(s[m - 1]) +
                         " below singularity threshold at mu=" +
                         std::to_string(mu));
    out.sigma = s[m - 1];
    return out;
  }
  linalg::SvdResultC svd = linalg::svd(c);
  if (svd.s[m - 1] < kSingularTol * svd.s[0])
    throw SingularAtMu("sigma_min below singularity threshold at mu=" +
                       std::to_string(mu));
  out.sigma = svd.s[m - 1];
  const VectorXcd v_min = svd.vh.row(m - 1).adjoint();
  out.y_hat = (*impl.basis) * v_min;
  return out;
}

struct LanczosWorkspace {
  Eigen::SparseLU<SpMatC> lu;
  bool analyzed = false;
};

// shift-invert Lanczos for the largest eigenvalue of (C^H C)^{-1}; the
// eigenvector is the right singular vector of C for sigma_min.
MinPair iterative_min_pair(const ResolventSolver::Impl& impl,
                           const SystemOperator& op, double mu, double tol,
                           LanczosWorkspace& ws, const VectorXcd* warm_start,
                           bool project_every = false) {
  if (std::abs(mu) < 1e-12)
    throw ConfigInvalid("iterative resolvent backend needs mu != 0");
  const int n = op.n_dof;
  const SpMatC c = impl.matrix_at(mu);
  if (!ws.analyzed) {
    ws.lu.analyzePattern(c);
    ws.analyzed = true;
  }
  ws.lu.factorize(c);
  if (ws.lu.info() != Eigen::Success)
    throw SingularAtMu("sparse factorization failed at mu=" +
                       std::to_string(mu));

  Rng rng(20240517);
  VectorXcd r0(n);
  for (int i = 0; i < n; ++i) r0[i] = cd(rng.normal(), rng.normal());
  impl.deflate(r0);
  if (r0.norm() < 1e-14) throw SolverFailure("degenerate Lanczos start");
  r0.normalize();
  VectorXcd v = r0;
  if (warm_start && warm_start->size() == n) {
    // a previous singular vector can be an eigenvector of the new C^H C on a
    // non-extremal branch, which stalls Lanczos there with a tiny residual;
    // mixing in a fixed random direction keeps the extremal branch reachable
    VectorXcd w = *warm_start;
    impl.deflate(w);
    const double wn = w.norm();
    if (wn > 1e-14) v = w / wn + 0.125 * r0;
  }
  impl.deflate(v);
  if (v.norm() < 1e-14) throw SolverFailure("degenerate Lanczos start");
  v.normalize();

  const int max_iter = std::min<int>(600, n);
  std::vector<VectorXcd> basis;
  std::vector<double> alpha, beta;
  basis.push_back(v);
  double lambda = 0;
  Eigen::VectorXd ritz_vec;
  bool converged = false;
  for (int j = 0; j < max_iter; ++j) {
    // w = (C^H C)^{-1} v_j : adjoint solve then forward solve
    VectorXcd w = ws.lu.solve(ws.lu.adjoint().solve(basis[j]).eval());
    if (project_every) impl.deflate(w);
    const double a = std::real(basis[j].dot(w));
    w -= cd(a, 0) * basis[j];
    if (j > 0) w -= cd(beta[j - 1], 0) * basis[j - 1];
    // full reorthogonalization
    for (const VectorXcd& q : basis) w -= q.dot(w) * q;
    alpha.push_back(a);
    const double b = w.norm();

    // tridiagonal Ritz problem
    const int m = static_cast<int>(alpha.size());
    MatrixXd t = MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(t);
    lambda = es.eigenvalues()[m - 1];
    ritz_vec = es.eigenvectors().col(m - 1);
    const double resid = b * std::abs(ritz_vec[m - 1]);
    if (resid <= 0.5 * tol * std::max(lambda, 1e-300) || b < 1e-13) {
      converged = true;
      break;
    }
    if (j + 1 < max_iter) {
      beta.push_back(b);
      basis.push_back(w / b);
    }
  }
  if (!converged)
    throw ConvergenceFailure("Lanczos did not converge at mu=" +
                             std::to_string(mu));

  const double sigma_max_bound = impl.ad_norm + std::abs(mu);
  // The converged Ritz value is a factorization-certified singularity
  // witness: lambda ~ 1/sigma^2 past the threshold means the solves amplified
  // a near-null direction.  The reconstructed vector cannot be trusted there
  // (solves are pure noise along that direction and the huge-to-tiny
  // cancellations pollute the basis), so its Rayleigh quotient can land on a
  // higher branch and silently report a finite resolvent norm.
  if (lambda > 0 && 1.0 / std::sqrt(lambda) < kSingularTol * sigma_max_bound)
    throw SingularAtMu("Ritz value certifies singularity at mu=" +
                       std::to_string(mu));

  VectorXcd y = VectorXcd::Zero(n);
  for (std::size_t i = 0; i < static_cast<std::size_t>(ritz_vec.size()); ++i)
    y += cd(ritz_vec[static_cast<int>(i)], 0) * basis[i];
  const double y_norm_before = y.norm();
  impl.deflate(y);
  if (!project_every && y.norm() < 0.5 * y_norm_before)
    // attracted to the deflation block (sigma there is exactly |mu|, the
    // global minimum when H_0 is better conditioned); redo with projection
    return iterative_min_pair(impl, op, mu, tol, ws, warm_start, true);
  if (y.norm() < 1e-14) throw SolverFailure("quasimode vector vanished");
  y.normalize();

  // exact Rayleigh quotient; matvec-based, independent of the Lanczos value
  const VectorXcd cy = c * y;
  MinPair out;
  out.sigma = cy.norm();
  out.y_hat = y;
  if (out.sigma < kSingularTol * sigma_max_bound)
    throw SingularAtMu("sigma_min " + std::to_string(out.sigma) +
                       " below singularity threshold at mu=" +
                       std::to_string(mu));
  return out;
}

}  // namespace

double ResolventSolver::norm(double mu, ResolventStrategy strategy,
                             double tol) const {
  if (strategy == ResolventStrategy::Auto)
    strategy = restricted_dim_ <= 2500 ? ResolventStrategy::Dense
                                       : ResolventStrategy::Iterative;
  if (strategy == ResolventStrategy::Dense) {
    impl_->build_dense(op_);
    return 1.0 / dense_min_pair(*impl_, mu, false).sigma;
  }
  LanczosWorkspace ws;
  return 1.0 / iterative_min_pair(*impl_, op_, mu, tol, ws, nullptr).sigma;
}

Quasimode ResolventSolver::quasimode(double mu, ResolventStrategy strategy,
                                     double tol) const {
  if (strategy == ResolventStrategy::Auto)
    strategy = restricted_dim_ <= 2500 ? ResolventStrategy::Dense
                                       : ResolventStrategy::Iterative;
  MinPair mp;
  if (strategy == ResolventStrategy::Dense) {
    impl_->build_dense(op_);
    mp = dense_min_pair(*impl_, mu, true);
  } else {
    LanczosWorkspace ws;
    mp = iterative_min_pair(*impl_, op_, mu, tol, ws, nullptr);
  }
  Quasimode qm;
  qm.mu = mu;
  qm.h = 1.0 / std::abs(mu);
  VectorXcd z_hat = mp.y_hat;
  const double nu = z_hat.head(op_.n_u).norm() + z_hat.tail(op_.n_r).norm();
  if (nu == 0) throw SolverFailure("quasimode has zero norm");
  z_hat /= nu;
  qm.z = op_.inv_sqrt_w.cast<cd>().cwiseProduct(z_hat);
  qm.z_norm = z_hat.norm();
  // recomputed defect, exact matvec in hatted coordinates
  VectorXcd res = op_.Ad_hat.cast<cd>() * z_hat - cd(0.0, mu) * z_hat;
  qm.sigma = res.norm() / qm.z_norm;
  return qm;
}

SweepResult ResolventSolver::sweep(const std::vector<double>& mu_grid,
                                   std::optional<double> cap,
                                   ResolventStrategy strategy, int workers,
                                   double tol) const {
  if (mu_grid.empty()) throw EmptyGrid("resolvent sweep needs a nonempty grid");
  for (double mu : mu_grid)
    if (!(mu > 0))
      throw ConfigInvalid("sweep grid must be positive (got " +
                          std::to_string(mu) + ")");
  if (strategy == ResolventStrategy::Auto) strategy = ResolventStrategy::Iterative;
  if (strategy == ResolventStrategy::Dense) impl_->build_dense(op_);

  const int n = static_cast<int>(mu_grid.size());
  SweepResult out;
  out.mus = mu_grid;
  out.norms.assign(n, 0.0);
  out.singular.assign(n, 0);
  out.cap = cap;

  const int nw = std::max(1, std::min(workers, n));
  const int chunk = (n + nw - 1) / nw;
  std::exception_ptr first_error;
  std::mutex err_mutex;

  parallel_for(nw, nw, [&](int t) {
    const int lo = t * chunk, hi = std::min(n, lo + chunk);
    LanczosWorkspace ws;
    VectorXcd warm;
    for (int i = lo; i < hi; ++i) {
      try {
        if (strategy == ResolventStrategy::Dense) {
          out.norms[i] = 1.0 / dense_min_pair(*impl_, mu_grid[i], false).sigma;
        } else {
          const VectorXcd* w0 = warm.size() ? &warm : nullptr;
          MinPair mp = iterative_min_pair(*impl_, op_, mu_grid[i], tol, ws, w0);
          out.norms[i] = 1.0 / mp.sigma;
          warm = std::move(mp.y_hat);
        }
      } catch (const SingularAtMu&) {
        out.singular[i] = 1;
        out.norms[i] = std::numeric_limits<double>::infinity();
      } catch (...) {
        std::lock_guard<std::mutex> g(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  });
  if (first_error) std::rethrow_exception(first_error);

  out.sup = 0;
  out.argmax_mu = mu_grid[0];
  for (int i = 0; i < n; ++i)
    if (out.norms[i] > out.sup) {
      out.sup = out.norms[i];
      out.argmax_mu = mu_grid[i];
    }
  if (cap) out.verdict_bounded = std::isfinite(out.sup) && out.sup <= *cap;
  return out;
}

double resolvent_norm(const SystemOperator& op, const KernelBasis& kernel,
                      double mu, ResolventStrategy strategy) {
  return ResolventSolver(op, kernel).norm(mu, strategy);
}

SweepResult resolvent_sweep(const SystemOperator& op, const KernelBasis& kernel,
                            const std::vector<double>& mu_grid,
                            std::optional<double> cap, int workers) {
  return ResolventSolver(op, kernel).sweep(mu_grid, cap,
                                           ResolventStrategy::Iterative,
                                           workers);
}

Quasimode quasimode(const SystemOperator& op, const KernelBasis& kernel,
                    double mu, ResolventStrategy strategy) {
  return ResolventSolver(op, kernel).quasimode(mu, strategy);
}

double equipartition_defect(const SystemOperator& op, const Quasimode& qm) {
  return std::abs(u_norm_H(op, qm.z) - r_norm_H(op, qm.z));
}

double damping_overlap(const SystemOperator& op, const Quasimode& qm) {
  double s = 0;
  for (int f = 0; f < op.n_u; ++f)
    if (op.d[f] != 0.0) s += op.d[f] * op.w[f] * std::norm(qm.z[f]);
  return s;
}

}  // namespace acoustolab
