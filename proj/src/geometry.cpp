#include "acoustolab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "acoustolab/errors.hpp"

namespace acoustolab {

namespace {

double wrap_pi(double a) {
  // wrap to (-pi, pi]
  a = std::fmod(a, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  if (a > M_PI) a -= 2.0 * M_PI;
  return a;
}

double mod_2pi(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a < 0) a += 2.0 * M_PI;
  return a;
}

}  // namespace

// -- Domain -------------------------------------------------------------------

Domain Domain::rectangle(double lx, double ly) {
  if (!(lx > 0) || !(ly > 0))
    throw ConfigInvalid("rectangle sides must be positive");
  Domain d;
  d.kind_ = DomainKind::Rectangle;
  d.lx_ = lx;
  d.ly_ = ly;
  return d;
}

Domain Domain::disk(double rout) {
  if (!(rout > 0)) throw ConfigInvalid("disk radius must be positive");
  Domain d;
  d.kind_ = DomainKind::Disk;
  d.rin_ = 0;
  d.rout_ = rout;
  return d;
}

Domain Domain::annulus(double rin, double rout) {
  if (!(rin > 0) || !(rout > rin))
    throw ConfigInvalid("annulus radii must satisfy 0 < rin < rout");
  Domain d;
  d.kind_ = DomainKind::Annulus;
  d.rin_ = rin;
  d.rout_ = rout;
  return d;
}

double Domain::diameter() const {
  switch (kind_) {
    case DomainKind::Rectangle: return std::hypot(lx_, ly_);
    default: return 2.0 * rout_;
  }
}

double Domain::area() const {
  switch (kind_) {
    case DomainKind::Rectangle: return lx_ * ly_;
    case DomainKind::Disk: return M_PI * rout_ * rout_;
    case DomainKind::Annulus: return M_PI * (rout_ * rout_ - rin_ * rin_);
  }
  return 0;
}

double Domain::boundary_distance(const Vec2& x) const {
  switch (kind_) {
    case DomainKind::Rectangle: {
      const double dx = std::min(x.x(), lx_ - x.x());
      const double dy = std::min(x.y(), ly_ - x.y());
      if (dx >= 0 && dy >= 0) return std::min(dx, dy);
      // outside: distance to the closed box
      const double ox = std::max({0.0, -x.x(), x.x() - lx_});
      const double oy = std::max({0.0, -x.y(), x.y() - ly_});
      return -std::hypot(ox, oy);
    }
    case DomainKind::Disk:
      return rout_ - x.norm();
    case DomainKind::Annulus:
      return std::min(x.norm() - rin_, rout_ - x.norm());
  }
  return 0;
}

Vec2 Domain::boundary_normal(const Vec2& x, double tol) const {
  if (tol < 0) tol = 1e-9 * diameter();
  if (std::abs(boundary_distance(x)) > tol)
    throw NotOnBoundary("point is not on the boundary (distance " +
                        std::to_string(boundary_distance(x)) + ")");
  switch (kind_) {
    case DomainKind::Rectangle: {
      // nearest side wins; ties (corners) resolved in the order below
      const double d[4] = {x.x(), lx_ - x.x(), x.y(), ly_ - x.y()};
      int side = 0;
      for (int i = 1; i < 4; ++i)
        if (std::abs(d[i]) < std::abs(d[side])) side = i;
      static const double nx[4] = {-1, 1, 0, 0};
      static const double ny[4] = {0, 0, -1, 1};
      return Vec2(nx[side], ny[side]);
    }
    case DomainKind::Disk:
      return x.normalized();
    case DomainKind::Annulus: {
      const double r = x.norm();
      if (std::abs(r - rin_) < std::abs(rout_ - r)) return -x.normalized();
      return x.normalized();
    }
  }
  return Vec2(0, 0);
}

std::string Domain::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case DomainKind::Rectangle: os << "rectangle " << lx_ << " x " << ly_; break;
    case DomainKind::Disk: os << "disk R=" << rout_; break;
    case DomainKind::Annulus: os << "annulus [" << rin_ << ", " << rout_ << "]"; break;
  }
  return os.str();
}

// -- DampingField ---------------------------------------------------------------

DampingField DampingField::zero() { return DampingField{}; }

DampingField DampingField::constant(double amplitude) {
  if (amplitude < 0) throw ConfigInvalid("damping amplitude must be >= 0");
  DampingField b;
  b.profile_ = amplitude > 0 ? DampingProfile::Constant : DampingProfile::Zero;
  b.amplitude_ = amplitude;
  return b;
}

DampingField DampingField::boundary_collar(double width, double amplitude,
                                           double exponent) {
  if (!(width > 0)) throw ConfigInvalid("collar width must be positive");
  if (amplitude < 0) throw ConfigInvalid("damping amplitude must be >= 0");
  if (exponent < 0) throw ConfigInvalid("ramp exponent must be >= 0");
  DampingField b;
  b.profile_ = DampingProfile::BoundaryCollar;
  b.width_ = width;
  b.amplitude_ = amplitude;
  b.exponent_ = exponent;
  return b;
}

DampingField DampingField::interior_ball(const Vec2& center, double radius,
                                         double amplitude, double exponent) {
  if (!(radius > 0)) throw ConfigInvalid("ball radius must be positive");
  if (amplitude < 0) throw ConfigInvalid("damping amplitude must be >= 0");
  if (exponent < 0) throw ConfigInvalid("ramp exponent must be >= 0");
  DampingField b;
  b.profile_ = DampingProfile::InteriorBall;
  b.center_ = center;
  b.radius_ = radius;
  b.amplitude_ = amplitude;
  b.exponent_ = exponent;
  return b;
}

double DampingField::operator()(const Domain& dom, const Vec2& x) const {
  switch (profile_) {
    case DampingProfile::Zero: return 0.0;
    case DampingProfile::Constant: return amplitude_;
    case DampingProfile::BoundaryCollar: {
      const double d = std::max(dom.boundary_distance(x), 0.0);
      if (d >= width_) return 0.0;
      return amplitude_ * std::pow(1.0 - d / width_, exponent_);
    }
    case DampingProfile::InteriorBall: {
      const double d = (x - center_).norm();
      if (d >= radius_) return 0.0;
      return amplitude_ * std::pow(1.0 - d / radius_, exponent_);
    }
  }
  return 0.0;
}

bool DampingField::in_support(const Domain& dom, const Vec2& x) const {
  switch (profile_) {
    case DampingProfile::Zero: return false;
    case DampingProfile::Constant: return true;
    case DampingProfile::BoundaryCollar:
      return std::max(dom.boundary_distance(x), 0.0) < width_;
    case DampingProfile::InteriorBall:
      return (x - center_).norm() < radius_;
  }
  return false;
}

std::string DampingField::describe() const {
  std::ostringstream os;
  switch (profile_) {
    case DampingProfile::Zero: os << "b = 0"; break;
    case DampingProfile::Constant: os << "b = " << amplitude_; break;
    case DampingProfile::BoundaryCollar:
      os << "collar(width=" << width_ << ", amp=" << amplitude_
         << ", p=" << exponent_ << ")";
      break;
    case DampingProfile::InteriorBall:
      os << "ball(center=(" << center_.x() << "," << center_.y()
         << "), radius=" << radius_ << ", amp=" << amplitude_
         << ", p=" << exponent_ << ")";
      break;
  }
  return os.str();
}

// -- ControlRegion ----------------------------------------------------------------

ControlRegion ControlRegion::ball(const Vec2& center, double radius) {
  if (!(radius > 0)) throw ConfigInvalid("region ball radius must be positive");
  ControlRegion r;
  r.kind_ = Kind::Ball;
  r.center_ = center;
  r.radius_ = radius;
  return r;
}

ControlRegion ControlRegion::boundary_collar(double width) {
  if (!(width > 0)) throw ConfigInvalid("region collar width must be positive");
  ControlRegion r;
  r.kind_ = Kind::Collar;
  r.width_ = width;
  return r;
}

ControlRegion ControlRegion::radial_band(double r_lo, double r_hi) {
  if (!(0 <= r_lo && r_lo < r_hi))
    throw ConfigInvalid("radial band requires 0 <= r_lo < r_hi");
  ControlRegion r;
  r.kind_ = Kind::RadialBand;
  r.r_lo_ = r_lo;
  r.r_hi_ = r_hi;
  return r;
}

ControlRegion ControlRegion::damping_support(const DampingField& b) {
  switch (b.profile()) {
    case DampingProfile::Zero: {
      ControlRegion r;          // empty: represented as a ball of radius 0 is
      r.kind_ = Kind::Ball;     // forbidden, use an unreachable ball instead
      r.center_ = Vec2(std::numeric_limits<double>::max() / 4, 0);
      r.radius_ = 1.0;
      return r;
    }
    case DampingProfile::Constant: {
      ControlRegion r;
      r.kind_ = Kind::All;
      return r;
    }
    case DampingProfile::BoundaryCollar:
      return boundary_collar(b.width());
    case DampingProfile::InteriorBall:
      return ball(b.center(), b.radius());
  }
  return ControlRegion{};
}

bool ControlRegion::contains(const Domain& dom, const Vec2& x) const {
  // Closed-set membership with rounding slack: the first-entry queries
  // return roots that land on the region boundary only up to rounding, and
  // those limit points must test as members.
  const double btol = 1e-12 * dom.diameter();
  if (!dom.contains(x, btol)) return false;
  switch (kind_) {
    case Kind::All: return true;
    case Kind::Ball: return (x - center_).norm() <= radius_ + btol;
    case Kind::Collar: return dom.boundary_distance(x) <= width_ + btol;
    case Kind::RadialBand: {
      const double r = x.norm();
      return r_lo_ - btol <= r && r <= r_hi_ + btol;
    }
  }
  return false;
}

namespace {

void push_quadratic_roots(double A, double B, double C, std::vector<double>& out) {
  // roots of A s^2 + B s + C = 0 (A > 0 here)
  const double disc = B * B - 4 * A * C;
  if (disc < 0) return;
  const double sq = std::sqrt(disc);
  // numerically stable split
  const double q = -0.5 * (B + (B >= 0 ? sq : -sq));
  out.push_back(q / A);
  if (q != 0) out.push_back(C / q);
}

}  // namespace

std::optional<double> ControlRegion::first_entry_segment(const Domain& dom,
                                                         const Vec2& x0,
                                                         const Vec2& xi,
                                                         double s_len) const {
  // Membership (region clipped to the domain) along x(s) = x0 + 2 s xi is a
  // finite union of closed intervals whose left endpoints are s = 0 or roots
  // of a defining boundary -- of the region or of the domain (the segment may
  // leave the domain, or cross the annulus hole and re-enter).  Enumerating
  // every root and testing contains() at each is therefore exhaustive.
  std::vector<double> cand;
  cand.push_back(0.0);
  const double b = 4.0 * x0.dot(xi);  // |x(s)|^2 = 4 s^2 + b s + |x0|^2
  auto push_circle = [&](double r) {
    push_quadratic_roots(4.0, b, x0.squaredNorm() - r * r, cand);
  };
  auto push_line = [&](double a, double v, double c) {
    if (v != 0) cand.push_back((c - a) / v);
  };
  switch (dom.kind()) {
    case DomainKind::Rectangle:
      push_line(x0.x(), 2 * xi.x(), 0.0);
      push_line(x0.x(), 2 * xi.x(), dom.lx());
      push_line(x0.y(), 2 * xi.y(), 0.0);
      push_line(x0.y(), 2 * xi.y(), dom.ly());
      break;
    case DomainKind::Disk:
      push_circle(dom.rout());
      break;
    case DomainKind::Annulus:
      push_circle(dom.rin());
      push_circle(dom.rout());
      break;
  }
  switch (kind_) {
    case Kind::All:
      break;
    case Kind::Ball: {
      const Vec2 d = x0 - center_;
      push_quadratic_roots(4.0, 4.0 * d.dot(xi),
                           d.squaredNorm() - radius_ * radius_, cand);
      break;
    }
    case Kind::RadialBand:
      push_circle(r_lo_);
      push_circle(r_hi_);
      break;
    case Kind::Collar:
      switch (dom.kind()) {
        case DomainKind::Rectangle:
          push_line(x0.x(), 2 * xi.x(), width_);
          push_line(x0.x(), 2 * xi.x(), dom.lx() - width_);
          push_line(x0.y(), 2 * xi.y(), width_);
          push_line(x0.y(), 2 * xi.y(), dom.ly() - width_);
          break;
        case DomainKind::Disk:
          push_circle(dom.rout() - width_);
          break;
        case DomainKind::Annulus:
          push_circle(dom.rin() + width_);
          push_circle(dom.rout() - width_);
          break;
      }
      break;
  }
  std::optional<double> best;
  for (double s : cand)
    if (s >= 0 && s <= s_len && (!best || s < *best) &&
        contains(dom, x0 + 2 * s * xi))
      best = s;
  return best;
}

std::optional<double> ControlRegion::first_entry_arc(const Domain& dom,
                                                     double radius,
                                                     double angle0, int direction,
                                                     double s_len) const {
  switch (kind_) {
    case Kind::All:
      return 0.0;
    case Kind::Collar: {
      // arcs ride on a boundary circle, whose points are at depth 0 < width
      (void)dom;
      return 0.0;
    }
    case Kind::RadialBand:
      if (r_lo_ <= radius && radius <= r_hi_) return 0.0;
      return std::nullopt;
    case Kind::Ball: {
      // point at angle phi: |R e(phi) - c| <= r  <=>  cos(phi - psi) >= t
      const double cn = center_.norm();
      if (cn == 0.0)
        return radius <= radius_ ? std::optional<double>(0.0) : std::nullopt;
      const double t =
          (radius * radius + cn * cn - radius_ * radius_) / (2.0 * radius * cn);
      if (t > 1.0) return std::nullopt;
      if (t <= -1.0) return 0.0;
      const double psi = std::atan2(center_.y(), center_.x());
      const double theta = std::acos(t);
      const double delta0 = wrap_pi(angle0 - psi);
      if (std::abs(delta0) <= theta) return 0.0;
      // angular speed is 2*direction/radius
      double dphi;  // angle to travel until entering [psi-theta, psi+theta]
      if (direction > 0)
        dphi = mod_2pi(-theta - delta0);
      else
        dphi = mod_2pi(delta0 - theta);
      const double s = dphi * radius / 2.0;
      if (s <= s_len) return s;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::string ControlRegion::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::All: os << "whole domain"; break;
    case Kind::Ball:
      os << "ball(center=(" << center_.x() << "," << center_.y()
         << "), radius=" << radius_ << ")";
      break;
    case Kind::Collar: os << "collar(width=" << width_ << ")"; break;
    case Kind::RadialBand:
      os << "radial band [" << r_lo_ << ", " << r_hi_ << "]";
      break;
  }
  return os.str();
}

}  // namespace acoustolab
