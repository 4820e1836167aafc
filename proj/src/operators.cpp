#include "acoustolab/operators.hpp"

#include <cmath>
#include <vector>

#include "acoustolab/errors.hpp"

namespace acoustolab {

SystemOperator assemble(const Domain& domain, Resolution res,
                        const DampingField& b) {
  SystemOperator op{build_grid(domain, res), b};
  const StaggeredGrid& g = op.grid;
  op.n_u = g.n_faces();
  op.n_r = g.n_cells();
  op.n_dof = op.n_u + op.n_r;

  op.w.resize(op.n_dof);
  for (int f = 0; f < op.n_u; ++f)
    op.w[f] = g.faces[f].flux_len * g.faces[f].spacing;
  for (int c = 0; c < op.n_r; ++c) op.w[op.n_u + c] = g.cells[c].area;
  op.sqrt_w = op.w.cwiseSqrt();
  op.inv_sqrt_w = op.sqrt_w.cwiseInverse();

  op.d = VectorXd::Zero(op.n_dof);
  for (int f = 0; f < op.n_u; ++f) op.d[f] = b(domain, g.faces[f].pos);

  // A: gradient rows (faces) and divergence rows (cells)
  std::vector<Eigen::Triplet<double>> ta, tad, th;
  ta.reserve(4 * static_cast<std::size_t>(op.n_u));
  tad.reserve(5 * static_cast<std::size_t>(op.n_u));
  th.reserve(5 * static_cast<std::size_t>(op.n_u));
  for (int f = 0; f < op.n_u; ++f) {
    const GridFace& fc = g.faces[f];
    const int lo = op.n_u + fc.lo, hi = op.n_u + fc.hi;
    // (G r)_f = (r_hi - r_lo) / spacing
    const double ginv = 1.0 / fc.spacing;
    // (V u)_c = sum of signed fluxes / area
    const double v_hi = -fc.flux_len / g.cells[fc.hi].area;
    const double v_lo = fc.flux_len / g.cells[fc.lo].area;
    ta.emplace_back(f, hi, ginv);
    ta.emplace_back(f, lo, -ginv);
    ta.emplace_back(hi, f, v_hi);
    ta.emplace_back(lo, f, v_lo);
    tad.emplace_back(f, hi, -ginv);
    tad.emplace_back(f, lo, ginv);
    tad.emplace_back(hi, f, -v_hi);
    tad.emplace_back(lo, f, -v_lo);
    // hatted entries, exactly antisymmetric by sharing one rounded value:
    // e = flux_len / (sqrt(w_f) * sqrt(a_c))
    const double e_hi = fc.flux_len / (op.sqrt_w[f] * op.sqrt_w[hi]);
    const double e_lo = fc.flux_len / (op.sqrt_w[f] * op.sqrt_w[lo]);
    th.emplace_back(f, hi, -e_hi);   // entries of -A_hat
    th.emplace_back(hi, f, e_hi);
    th.emplace_back(f, lo, e_lo);
    th.emplace_back(lo, f, -e_lo);
  }
  for (int i = 0; i < op.n_dof; ++i)
    if (op.d[i] != 0.0) {
      tad.emplace_back(i, i, -op.d[i]);
      th.emplace_back(i, i, -op.d[i]);
    }
  op.A.resize(op.n_dof, op.n_dof);
  op.A.setFromTriplets(ta.begin(), ta.end());
  op.Ad.resize(op.n_dof, op.n_dof);
  op.Ad.setFromTriplets(tad.begin(), tad.end());
  op.Ad_hat.resize(op.n_dof, op.n_dof);
  op.Ad_hat.setFromTriplets(th.begin(), th.end());
  op.A.makeCompressed();
  op.Ad.makeCompressed();
  op.Ad_hat.makeCompressed();
  return op;
}

double inner_product_H(const SystemOperator& op, const VectorXd& z,
                       const VectorXd& v) {
  if (z.size() != op.n_dof || v.size() != op.n_dof)
    throw ShapeMismatch("inner_product_H: state size mismatch");
  return z.cwiseProduct(op.w).dot(v);
}

std::complex<double> inner_product_H(const SystemOperator& op,
                                     const VectorXcd& z, const VectorXcd& v) {
  if (z.size() != op.n_dof || v.size() != op.n_dof)
    throw ShapeMismatch("inner_product_H: state size mismatch");
  // conjugate-linear in the first argument, matching Eigen's dot
  return (z.cwiseProduct(op.w.cast<std::complex<double>>())).dot(v);
}

double norm_H(const SystemOperator& op, const VectorXd& z) {
  return std::sqrt(std::max(0.0, inner_product_H(op, z, z)));
}

double norm_H(const SystemOperator& op, const VectorXcd& z) {
  double s = 0;
  for (int i = 0; i < op.n_dof; ++i) s += op.w[i] * std::norm(z[i]);
  return std::sqrt(s);
}

VectorXd mean_zero_project(const SystemOperator& op, const VectorXd& r) {
  if (r.size() != op.n_r) throw ShapeMismatch("mean_zero_project: size");
  const VectorXd areas = op.w.tail(op.n_r);
  const double mean = areas.dot(r) / areas.sum();
  return r.array() - mean;
}

double u_norm_H(const SystemOperator& op, const VectorXcd& z) {
  double s = 0;
  for (int i = 0; i < op.n_u; ++i) s += op.w[i] * std::norm(z[i]);
  return std::sqrt(s);
}

double r_norm_H(const SystemOperator& op, const VectorXcd& z) {
  double s = 0;
  for (int i = op.n_u; i < op.n_dof; ++i) s += op.w[i] * std::norm(z[i]);
  return std::sqrt(s);
}

}  // namespace acoustolab
