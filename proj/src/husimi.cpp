#include "acoustolab/husimi.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "acoustolab/errors.hpp"
#include "acoustolab/parallel.hpp"

namespace acoustolab {

using cd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;

Patch patch_from_state(const SystemOperator& op, const VectorXcd& z) {
  if (z.size() != op.n_dof) throw ShapeMismatch("patch_from_state: state size");
  const StaggeredGrid& g = op.grid;
  const Domain& dom = g.domain;
  Patch p;
  switch (dom.kind()) {
    case DomainKind::Rectangle: {
      p.nx = g.res.n1;
      p.ny = g.res.n2;
      p.dx = dom.lx() / p.nx;
      p.dy = dom.ly() / p.ny;
      p.x0 = 0;
      p.y0 = 0;
      p.f.resize(p.nx, p.ny);
      for (int j = 0; j < p.ny; ++j)
        for (int i = 0; i < p.nx; ++i)
          p.f(i, j) = z[op.n_u + g.cell_id(i, j)];
      return p;
    }
    case DomainKind::Annulus: {
      // unroll the middle 60% radial band at the central radius
      const int nr = g.res.n1, nt = g.res.n2;
      const double hr = (dom.rout() - dom.rin()) / nr;
      const int i_lo = nr / 5;
      const int i_hi = nr - nr / 5;
      const double r_mid = dom.rin() + 0.5 * (i_lo + i_hi) * hr;
      p.nx = nt;
      p.ny = i_hi - i_lo;
      p.dx = 2.0 * M_PI * r_mid / nt;  // arc length at the band center
      p.dy = hr;
      p.x0 = 0;
      p.y0 = dom.rin() + i_lo * hr;
      p.f.resize(p.nx, p.ny);
      for (int j = 0; j < p.ny; ++j)
        for (int i = 0; i < p.nx; ++i)
          p.f(i, j) = z[op.n_u + g.cell_id(i_lo + j, i)];
      return p;
    }
    case DomainKind::Disk:
      throw UnsupportedDomain("no grid states on the disk");
  }
  throw UnsupportedDomain("unknown domain kind");
}

HusimiDensity husimi_transform(const Patch& patch, double h,
                               HusimiOptions opts) {
  if (!(h > 0)) throw ConfigInvalid("husimi: h must be positive");
  const double max_spacing = 2.0 * M_PI * h / 6.0;
  if (std::max(patch.dx, patch.dy) > max_spacing)
    throw ResolutionGuard(
        "grid spacing " + std::to_string(std::max(patch.dx, patch.dy)) +
        " exceeds " + std::to_string(max_spacing) +
        " (6 points per wavelength at h=" + std::to_string(h) + ")");

  const double sqh = std::sqrt(h);
  const double margin = opts.margin >= 0 ? opts.margin : 3.0 * sqh;
  const double lx = patch.nx * patch.dx, ly = patch.ny * patch.dy;
  auto auto_n = [&](double len) {
    return std::clamp(static_cast<int>(std::ceil(len / (0.5 * sqh))), 8, 64);
  };
  const int n_x0 = opts.n_x0 > 0 ? opts.n_x0 : auto_n(lx + 2 * margin);
  const int n_y0 = opts.n_y0 > 0 ? opts.n_y0 : auto_n(ly + 2 * margin);
  const int n_xi =
      opts.n_xi > 0
          ? opts.n_xi
          : std::clamp(static_cast<int>(std::ceil(2.0 * opts.xi_max / 0.05)),
                       32, 160);

  HusimiDensity out;
  out.h = h;
  const double dx0 = (lx + 2 * margin) / n_x0;
  const double dy0 = (ly + 2 * margin) / n_y0;
  const double dxi = 2.0 * opts.xi_max / n_xi;
  out.x0s.resize(n_x0);
  for (int a = 0; a < n_x0; ++a)
    out.x0s[a] = patch.x0 - margin + (a + 0.5) * dx0;
  out.y0s.resize(n_y0);
  for (int b = 0; b < n_y0; ++b)
    out.y0s[b] = patch.y0 - margin + (b + 0.5) * dy0;
  out.xis.resize(n_xi);
  for (int a = 0; a < n_xi; ++a) out.xis[a] = -opts.xi_max + (a + 0.5) * dxi;

  // cell centers
  Eigen::VectorXd xc(patch.nx), yc(patch.ny);
  for (int i = 0; i < patch.nx; ++i) xc[i] = patch.x0 + (i + 0.5) * patch.dx;
  for (int j = 0; j < patch.ny; ++j) yc[j] = patch.y0 + (j + 0.5) * patch.dy;

  // frequency factors e^{-i x xi / h}, shared by all window positions
  MatrixXcd ex(n_xi, patch.nx), ey(n_xi, patch.ny);
  for (int a = 0; a < n_xi; ++a) {
    for (int i = 0; i < patch.nx; ++i)
      ex(a, i) = std::polar(1.0, -xc[i] * out.xis[a] / h);
    for (int j = 0; j < patch.ny; ++j)
      ey(a, j) = std::polar(1.0, -yc[j] * out.xis[a] / h);
  }

  out.x_marginal = MatrixXd::Zero(n_x0, n_y0);
  out.xi_marginal = MatrixXd::Zero(n_xi, n_xi);
  const double prefactor = std::pow(M_PI * h, -0.5) * patch.dx * patch.dy;
  const double cell_vol = dx0 * dy0 * dxi * dxi;
  const double density_norm = 1.0 / std::pow(2.0 * M_PI * h, 2);
  const double cutoff = 6.0 * sqh;  // window support truncation

  for (int b = 0; b < n_y0; ++b) {
    const double y0 = out.y0s[b];
    int ja = patch.ny, jb = -1;
    for (int j = 0; j < patch.ny; ++j)
      if (std::abs(yc[j] - y0) <= cutoff) {
        ja = std::min(ja, j);
        jb = std::max(jb, j);
      }
    if (jb < ja) continue;
    Eigen::VectorXd wy(jb - ja + 1);
    for (int j = ja; j <= jb; ++j)
      wy[j - ja] = std::exp(-(yc[j] - y0) * (yc[j] - y0) / (2 * h));
    for (int a = 0; a < n_x0; ++a) {
      const double x0 = out.x0s[a];
      int ia = patch.nx, ib = -1;
      for (int i = 0; i < patch.nx; ++i)
        if (std::abs(xc[i] - x0) <= cutoff) {
          ia = std::min(ia, i);
          ib = std::max(ib, i);
        }
      if (ib < ia) continue;
      Eigen::VectorXd wx(ib - ia + 1);
      for (int i = ia; i <= ib; ++i)
        wx[i - ia] = std::exp(-(xc[i] - x0) * (xc[i] - x0) / (2 * h));

      const MatrixXcd m =
          (wx * wy.transpose()).cast<cd>().array() *
          patch.f.block(ia, ja, ib - ia + 1, jb - ja + 1).array();
      const MatrixXcd t = ex.middleCols(ia, ib - ia + 1) * m *
                          ey.middleCols(ja, jb - ja + 1).transpose();
      double cell_sum = 0;
      for (int q = 0; q < n_xi; ++q)
        for (int pidx = 0; pidx < n_xi; ++pidx) {
          const double mass =
              std::norm(t(pidx, q)) * prefactor * prefactor * density_norm *
              cell_vol;
          out.xi_marginal(pidx, q) += mass;
          cell_sum += mass;
        }
      out.x_marginal(a, b) = cell_sum;
      out.total_mass += cell_sum;
    }
  }
  return out;
}

double shell_mass_defect(const HusimiDensity& density, double delta) {
  if (density.total_mass < 1e-30)
    throw ZeroMass("husimi density has no mass");
  const int n = static_cast<int>(density.xis.size());
  double off = 0;
  for (int q = 0; q < n; ++q)
    for (int p = 0; p < n; ++p) {
      const double xi2 = density.xis[p] * density.xis[p] +
                         density.xis[q] * density.xis[q];
      if (std::abs(xi2 - 1.0) > delta) off += density.xi_marginal(p, q);
    }
  return off / density.total_mass;
}

std::vector<HusimiSummary> measure_scan(const SystemOperator& op,
                                        const KernelBasis& kernel,
                                        const std::vector<double>& mu_list,
                                        double delta, int workers,
                                        HusimiOptions opts) {
  if (mu_list.empty()) throw EmptyGrid("measure_scan: empty mu list");
  for (std::size_t i = 0; i < mu_list.size(); ++i) {
    if (!(mu_list[i] > 0))
      throw ConfigInvalid("measure_scan: mu values must be positive");
    if (i > 0 && !(mu_list[i] > mu_list[i - 1]))
      throw ConfigInvalid("measure_scan: mu list must be increasing");
  }
  ResolventSolver solver(op, kernel);
  std::vector<HusimiSummary> out(mu_list.size());
  std::exception_ptr first_error;
  std::mutex err_mutex;
  parallel_for(static_cast<int>(mu_list.size()), workers, [&](int i) {
    try {
      const double mu = mu_list[i];
      const Quasimode qm = solver.quasimode(mu);
      HusimiSummary s;
      s.mu = mu;
      s.h = qm.h;
      s.damping_overlap = damping_overlap(op, qm);
      s.equipartition_defect = equipartition_defect(op, qm);
      const HusimiDensity density =
          husimi_transform(patch_from_state(op, qm.z), qm.h, opts);
      s.total_mass = density.total_mass;
      s.shell_mass_defect = shell_mass_defect(density, delta);
      out[i] = s;
    } catch (...) {
      std::lock_guard<std::mutex> g(err_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  });
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace acoustolab
