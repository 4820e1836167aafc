#pragma once

// Phase-space diagnostics of quasimodes: discrete Husimi (coherent-state)
// transform of the scalar r-field, shell concentration, and the per-mu scan
// that tabulates the semiclassical trends.
//
// H(x0, xi0) = |<f, g_{x0,xi0}>|^2 / (2 pi h)^d with the L2-normalized
// Gaussian window g = (pi h)^{-d/4} exp(-|x-x0|^2/(2h)) exp(i x.xi0/h).
// With that normalization, integrating H over phase space recovers ||f||^2
// (coherent-state resolution of identity), so masses are directly comparable
// to field norms.  Only the two 2-D marginals are stored; the full 4-D grid
// is never materialized.

#include <Eigen/Dense>

#include "acoustolab/spectral.hpp"

namespace acoustolab {

struct Patch {
  int nx = 0, ny = 0;
  double x0 = 0, y0 = 0;  // lower-left corner
  double dx = 0, dy = 0;  // cell sizes; centers at x0 + (i+1/2) dx
  Eigen::MatrixXcd f;     // nx x ny
};

// r-field of a state as a Cartesian patch.  Rectangle: exact cell layout.
// Annulus: the middle radial band (60%) unrolled in (arc, radius) at the
// band's central radius; a flat approximation, adequate away from boundaries.
Patch patch_from_state(const SystemOperator& op, const VectorXcd& z);

struct HusimiOptions {
  int n_x0 = 0;        // 0 = auto (~ 2 windows per sqrt(h))
  int n_y0 = 0;
  int n_xi = 0;        // 0 = auto (xi cell ~ 0.05)
  double xi_max = 2.0;
  double margin = -1;  // x0-box margin beyond the patch; < 0 = auto (3 sqrt h)
};

struct HusimiDensity {
  double h = 0;
  std::vector<double> x0s, y0s, xis;  // grid centers
  Eigen::MatrixXd x_marginal;   // n_x0 x n_y0, mass per position cell
  Eigen::MatrixXd xi_marginal;  // n_xi x n_xi, mass per frequency cell
  double total_mass = 0;
};

// Throws ResolutionGuard if the patch has fewer than 6 points per wavelength
// (spacing > 2 pi h / 6).
HusimiDensity husimi_transform(const Patch& patch, double h,
                               HusimiOptions opts = {});

// Fraction of mass outside the characteristic shell ||xi|^2 - 1| <= delta.
double shell_mass_defect(const HusimiDensity& density, double delta = 0.25);

struct HusimiSummary {
  double mu = 0;
  double h = 0;
  double shell_mass_defect = 0;
  double damping_overlap = 0;
  double equipartition_defect = 0;
  double total_mass = 0;
};

// Quasimode at each mu (via the shared solver), then all diagnostics.
std::vector<HusimiSummary> measure_scan(const SystemOperator& op,
                                        const KernelBasis& kernel,
                                        const std::vector<double>& mu_list,
                                        double delta = 0.25, int workers = 1,
                                        HusimiOptions opts = {});

}  // namespace acoustolab
