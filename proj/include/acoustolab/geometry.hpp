#pragma once

// Domains, damping coefficients and control regions.
//
// Three bounded domains are supported: an axis-aligned rectangle
// (0,Lx)x(0,Ly), the disk {|x| < R}, and the annulus {Rin < |x| < Rout}.
// The disk is used by the ray tracer only; the grid assembler rejects it.
//
// Damping fields b >= 0 are given by closed-form profiles so that point
// evaluation and the support predicate {b > 0} are exact.  Control regions
// additionally answer exact first-entry queries for straight segments and for
// boundary arcs, which the geometric-control check relies on (no step-size
// artifacts when deciding whether a ray meets the region).

#include <Eigen/Core>
#include <optional>
#include <string>

namespace acoustolab {

using Vec2 = Eigen::Vector2d;

enum class DomainKind { Rectangle, Disk, Annulus };

class Domain {
 public:
  static Domain rectangle(double lx, double ly);
  static Domain disk(double rout);
  static Domain annulus(double rin, double rout);

  DomainKind kind() const { return kind_; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }
  double rin() const { return rin_; }
  double rout() const { return rout_; }
  double diameter() const;
  double area() const;

  // Signed distance to the boundary: positive inside, negative outside.
  double boundary_distance(const Vec2& x) const;

  bool contains(const Vec2& x, double tol = 0.0) const {
    return boundary_distance(x) >= -tol;
  }

  // Outward unit normal at a boundary point.  Throws NotOnBoundary when x is
  // farther than `tol` from the boundary (default: 1e-9 * diameter).  At a
  // rectangle corner the side with the smaller coordinate offset wins.
  Vec2 boundary_normal(const Vec2& x, double tol = -1.0) const;

  std::string describe() const;

 private:
  Domain() = default;
  DomainKind kind_ = DomainKind::Rectangle;
  double lx_ = 0, ly_ = 0;      // rectangle
  double rin_ = 0, rout_ = 0;   // disk / annulus
};

// -- damping ------------------------------------------------------------------

enum class DampingProfile { Zero, Constant, BoundaryCollar, InteriorBall };

// Nonnegative damping coefficient b(x).  The collar profile ramps
// polynomially from 0 at depth `width` to `amplitude` on the boundary:
//   b(x) = amplitude * (1 - d(x)/width)^exponent  for d(x) < width,
// with d the distance to the boundary.  The ball profile ramps the same way
// towards the center of the ball.  exponent >= 1 keeps b Lipschitz;
// exponent = 0 gives the flat (bang-bang) profile b = amplitude on the
// support, which is the profile with a uniform decay gap: a ramp lets
// vorticity concentrated at its foot decay arbitrarily slowly.
class DampingField {
 public:
  static DampingField zero();
  static DampingField constant(double amplitude);
  static DampingField boundary_collar(double width, double amplitude,
                                      double exponent = 2.0);
  static DampingField interior_ball(const Vec2& center, double radius,
                                    double amplitude, double exponent = 2.0);

  double operator()(const Domain& dom, const Vec2& x) const;
  bool in_support(const Domain& dom, const Vec2& x) const;  // {b > 0}, closed set not taken
  double amplitude() const { return amplitude_; }
  DampingProfile profile() const { return profile_; }
  double width() const { return width_; }
  double radius() const { return radius_; }
  Vec2 center() const { return center_; }
  double exponent() const { return exponent_; }

  std::string describe() const;

 private:
  DampingProfile profile_ = DampingProfile::Zero;
  double amplitude_ = 0, width_ = 0, radius_ = 0, exponent_ = 2.0;
  Vec2 center_{0, 0};
};

// -- control regions ----------------------------------------------------------

// Open subsets used as control regions omega.  Membership treats omega
// relative to the closed domain, so boundary points of Omega that satisfy the
// defining inequality count as inside (a gliding ray running along Gamma
// inside a collar is controlled).
class ControlRegion {
 public:
  static ControlRegion ball(const Vec2& center, double radius);
  static ControlRegion boundary_collar(double width);
  static ControlRegion radial_band(double r_lo, double r_hi);
  // Support of a damping field, resolved against the profile in closed form.
  static ControlRegion damping_support(const DampingField& b);

  bool contains(const Domain& dom, const Vec2& x) const;

  // First parameter s in [0, s_len] at which the segment
  //   s -> x0 + 2 s * xi          (|xi| = 1, Hamiltonian parametrization)
  // lies inside the region clipped to the domain (consistent with
  // contains()), or nullopt.  Exact (closed form).
  std::optional<double> first_entry_segment(const Domain& dom, const Vec2& x0,
                                            const Vec2& xi, double s_len) const;

  // Same for an arc of the circle |x| = radius starting at angle0 and moving
  // with angular velocity (2*direction/radius) in s (arc speed 2).
  std::optional<double> first_entry_arc(const Domain& dom, double radius,
                                        double angle0, int direction,
                                        double s_len) const;

  std::string describe() const;

 private:
  enum class Kind { All, Ball, Collar, RadialBand };
  Kind kind_ = Kind::All;
  Vec2 center_{0, 0};
  double radius_ = 0;        // ball
  double width_ = 0;         // collar
  double r_lo_ = 0, r_hi_ = 0;  // radial band
};

}  // namespace acoustolab
