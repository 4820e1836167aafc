#pragma once

// Staggered (MAC) grids: scalar r lives at cell centers, velocity components
// at face centers.  Faces on the boundary with normal orientation are not
// represented at all, so the impermeability condition u.n = 0 is structural
// rather than enforced.  The rectangle uses a Cartesian grid, the annulus a
// polar grid periodic in theta; cell areas on the polar grid are exact
// (0.5*(r_{i+1}^2 - r_i^2)*dtheta), so the total measure matches the domain
// area to rounding.

#include <vector>

#include "acoustolab/geometry.hpp"

namespace acoustolab {

struct Resolution {
  int n1 = 0;  // nx (rectangle) or nr (annulus)
  int n2 = 0;  // ny or ntheta
};

struct GridCell {
  Vec2 pos;     // cell center
  double area;  // |g|^{1/2} measure
};

struct GridFace {
  Vec2 pos;        // face center
  Vec2 dir;        // unit direction of the stored velocity component
  int lo, hi;      // adjacent cells; component points from lo to hi
  double flux_len; // flux = u * flux_len leaves cell `lo` through this face
  double spacing;  // distance between the two adjacent cell centers
};

struct StaggeredGrid {
  Domain domain;
  Resolution res;
  std::vector<GridCell> cells;
  std::vector<GridFace> faces;

  int n_cells() const { return static_cast<int>(cells.size()); }
  int n_faces() const { return static_cast<int>(faces.size()); }
  int cell_id(int i, int j) const { return j * res.n1 + i; }
};

// Throws UnsupportedDomain for the disk, ResolutionTooCoarse below 4 cells
// per direction.
StaggeredGrid build_grid(const Domain& domain, Resolution res);

}  // namespace acoustolab
