#include "acoustolab/grid.hpp"

#include <cmath>

#include "acoustolab/errors.hpp"

namespace acoustolab {

namespace {

StaggeredGrid build_rectangle(const Domain& dom, Resolution res) {
  const int nx = res.n1, ny = res.n2;
  const double hx = dom.lx() / nx, hy = dom.ly() / ny;
  StaggeredGrid g{dom, res, {}, {}};
  g.cells.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      g.cells.push_back({Vec2((i + 0.5) * hx, (j + 0.5) * hy), hx * hy});
  // x faces: between cells (i-1,j) and (i,j); boundary faces i=0, i=nx dropped
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i)
      g.faces.push_back({Vec2(i * hx, (j + 0.5) * hy), Vec2(1, 0),
                         g.cell_id(i - 1, j), g.cell_id(i, j), hy, hx});
  // y faces
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      g.faces.push_back({Vec2((i + 0.5) * hx, j * hy), Vec2(0, 1),
                         g.cell_id(i, j - 1), g.cell_id(i, j), hx, hy});
  return g;
}

StaggeredGrid build_annulus(const Domain& dom, Resolution res) {
  const int nr = res.n1, nt = res.n2;
  const double hr = (dom.rout() - dom.rin()) / nr;
  const double ht = 2.0 * M_PI / nt;
  StaggeredGrid g{dom, res, {}, {}};
  g.cells.reserve(static_cast<std::size_t>(nr) * nt);
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < nr; ++i) {
      const double r0 = dom.rin() + i * hr, r1 = dom.rin() + (i + 1) * hr;
      const double rc = dom.rin() + (i + 0.5) * hr;
      const double tc = (j + 0.5) * ht;
      g.cells.push_back({rc * Vec2(std::cos(tc), std::sin(tc)),
                         0.5 * (r1 * r1 - r0 * r0) * ht});
    }
  // radial faces at radius r_i, i = 1..nr-1 (faces on both circles dropped)
  for (int j = 0; j < nt; ++j)
    for (int i = 1; i < nr; ++i) {
      const double rf = dom.rin() + i * hr;
      const double tc = (j + 0.5) * ht;
      const Vec2 er(std::cos(tc), std::sin(tc));
      g.faces.push_back({rf * er, er, g.cell_id(i - 1, j), g.cell_id(i, j),
                         rf * ht, hr});
    }
  // angular faces at theta_j, periodic wrap; spacing is the arc between the
  // two adjacent cell centers
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < nr; ++i) {
      const double rc = dom.rin() + (i + 0.5) * hr;
      const double tf = j * ht;
      const Vec2 et(-std::sin(tf), std::cos(tf));
      g.faces.push_back({rc * Vec2(std::cos(tf), std::sin(tf)), et,
                         g.cell_id(i, (j + nt - 1) % nt), g.cell_id(i, j), hr,
                         rc * ht});
    }
  return g;
}

}  // namespace

StaggeredGrid build_grid(const Domain& domain, Resolution res) {
  if (res.n1 < 4 || res.n2 < 4)
    throw ResolutionTooCoarse("need at least 4 cells per direction, got " +
                              std::to_string(res.n1) + "x" +
                              std::to_string(res.n2));
  switch (domain.kind()) {
    case DomainKind::Rectangle: return build_rectangle(domain, res);
    case DomainKind::Annulus: return build_annulus(domain, res);
    case DomainKind::Disk:
      throw UnsupportedDomain(
          "disk has no staggered grid (rays only); use the annulus");
  }
  throw UnsupportedDomain("unknown domain kind");
}

}  // namespace acoustolab
