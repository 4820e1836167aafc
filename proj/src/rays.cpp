#include "acoustolab/rays.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "acoustolab/errors.hpp"
#include "acoustolab/parallel.hpp"
#include "acoustolab/sampling.hpp"

namespace acoustolab {
namespace {

constexpr double kTolGlance = 1e-8;  // |xi.n| below this is glancing
constexpr double kTolUnit = 1e-10;   // characteristic-set check on |xi|
// Hard cap on boundary events per ray; with the sampling used here a ray
// needs chords shorter than ~1e-4 to get anywhere near it.  Guards against
// hand-crafted whispering starts just above the glancing tolerance.
constexpr long kMaxEvents = 1000000;

double corner_tol(const Domain& dom) { return 1e-9 * dom.diameter(); }
double on_tol(const Domain& dom) { return 1e-9 * dom.diameter(); }
double s_tol(const Domain& dom) { return 1e-12 * dom.diameter(); }

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

void require_unit(const Vec2& xi) {
  if (std::abs(xi.norm() - 1.0) > kTolUnit) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "direction is off the characteristic set: |xi| = %.17g",
                  xi.norm());
    throw DegenerateDirection(buf);
  }
}

// Roots of s^2 + b s + c = 0 in increasing order, computed the stable way
// (larger-magnitude root from the formula, the other from the product).
int quadratic_roots(double b, double c, double out[2]) {
  const double disc = 0.25 * b * b - c;
  if (disc < 0) return 0;
  const double sq = std::sqrt(disc);
  double r1, r2;
  if (b >= 0) {
    r1 = -0.5 * b - sq;
    r2 = (r1 != 0) ? c / r1 : -0.5 * b + sq;
  } else {
    r2 = -0.5 * b + sq;
    r1 = (r2 != 0) ? c / r2 : -0.5 * b - sq;
  }
  if (r1 > r2) std::swap(r1, r2);
  out[0] = r1;
  out[1] = r2;
  return 2;
}

// Intersections of x0 + 2 s xi with the circle |x| = radius.  The constant
// term is formed as (|x|-R)(|x|+R) so that starts snapped onto the circle
// produce one accurate zero root instead of two garbage ones.
int circle_roots(const Vec2& x, const Vec2& xi, double radius, double out[2]) {
  const double rho = x.norm();
  const double b = x.dot(xi);
  const double c = 0.25 * (rho - radius) * (rho + radius);
  return quadratic_roots(b, c, out);
}

struct HitCandidate {
  double s = std::numeric_limits<double>::infinity();
  Vec2 x{0, 0};
};

void consider_circle(const Vec2& x, const Vec2& xi, double radius, double stol,
                     HitCandidate* best) {
  double roots[2];
  const int n = circle_roots(x, xi, radius, roots);
  for (int i = 0; i < n; ++i) {
    const double s = roots[i];
    if (s <= stol || s >= best->s) continue;
    Vec2 p = x + 2.0 * s * xi;
    p *= radius / p.norm();  // snap exactly onto the circle
    best->s = s;
    best->x = p;
  }
}

std::optional<BoundaryHit> next_hit(const Domain& dom, const Vec2& x,
                                    const Vec2& xi) {
  const double stol = s_tol(dom);
  HitCandidate best;
  switch (dom.kind()) {
    case DomainKind::Rectangle: {
      const double len[2] = {dom.lx(), dom.ly()};
      for (int a = 0; a < 2; ++a) {
        for (int side = 0; side < 2; ++side) {
          const double target = side == 0 ? 0.0 : len[a];
          const double v = 2.0 * xi[a];
          if (v == 0.0) continue;
          const double s = (target - x[a]) / v;
          if (s <= stol || s >= best.s) continue;
          const double other = x[1 - a] + 2.0 * s * xi[1 - a];
          if (other < -on_tol(dom) || other > len[1 - a] + on_tol(dom)) continue;
          Vec2 p;
          p[a] = target;
          p[1 - a] = std::clamp(other, 0.0, len[1 - a]);
          best.s = s;
          best.x = p;
        }
      }
      break;
    }
    case DomainKind::Disk:
      consider_circle(x, xi, dom.rout(), stol, &best);
      break;
    case DomainKind::Annulus:
      consider_circle(x, xi, dom.rout(), stol, &best);
      consider_circle(x, xi, dom.rin(), stol, &best);
      break;
  }
  if (!std::isfinite(best.s)) return std::nullopt;
  return BoundaryHit{best.s, best.x};
}

bool near_corner(const Domain& dom, const Vec2& x) {
  if (dom.kind() != DomainKind::Rectangle) return false;
  const double tol = corner_tol(dom);
  const Vec2 corners[4] = {{0, 0}, {dom.lx(), 0}, {0, dom.ly()},
                           {dom.lx(), dom.ly()}};
  for (const Vec2& c : corners) {
    if ((x - c).norm() <= tol) return true;
  }
  return false;
}

// Snap a point known to lie within tolerance of the boundary exactly onto it.
Vec2 snap_to_boundary(const Domain& dom, const Vec2& x) {
  switch (dom.kind()) {
    case DomainKind::Rectangle: {
      Vec2 p = x;
      const double tol = on_tol(dom);
      if (std::abs(p.x()) <= tol) p.x() = 0;
      if (std::abs(p.x() - dom.lx()) <= tol) p.x() = dom.lx();
      if (std::abs(p.y()) <= tol) p.y() = 0;
      if (std::abs(p.y() - dom.ly()) <= tol) p.y() = dom.ly();
      return p;
    }
    case DomainKind::Disk:
      return x * (dom.rout() / x.norm());
    case DomainKind::Annulus: {
      const double rho = x.norm();
      const double target =
          std::abs(rho - dom.rin()) < std::abs(rho - dom.rout()) ? dom.rin()
                                                                  : dom.rout();
      return x * (target / rho);
    }
  }
  return x;
}

// Walks the generalized flow, invoking
//   on_interior(s0, x, xi, len)       -> bool (continue?)
//   on_gliding(s0, R, angle0, dir, len) -> bool
//   on_event(s, contact, x)           -> bool
// Returns the termination reason and writes the reached parameter to *s_end.
template <class FI, class FG, class FE>
RayTermination walk_ray(const Domain& dom, PhasePoint rho, double s_max,
                        FI&& on_interior, FG&& on_gliding, FE&& on_event,
                        double* s_end) {
  require_unit(rho.xi);
  rho.xi.normalize();
  if (!dom.contains(rho.x, on_tol(dom))) {
    throw ConfigInvalid("ray start lies outside the closed domain");
  }

  double s = 0;
  Vec2 x = rho.x;
  Vec2 xi = rho.xi;
  bool gliding = false;
  *s_end = 0;

  // Boundary starts: reflect outward-moving hyperbolic states in place and
  // classify glancing ones, so the walk below always leaves from an
  // interior-admissible state.
  if (std::abs(dom.boundary_distance(x)) <= on_tol(dom)) {
    x = snap_to_boundary(dom, x);
    const ContactClass c = classify_contact(dom, x, xi);
    switch (c.kind) {
      case ContactKind::Corner:
        on_event(0.0, c, x);
        return RayTermination::CornerHit;
      case ContactKind::Hyperbolic:
        if (c.xi_d < 0) {  // moving outward: arrival at s = 0
          if (!on_event(0.0, c, x)) return RayTermination::TimeLimit;
          xi = reflect(dom, x, xi);
        }
        break;
      case ContactKind::Gliding:
        if (!on_event(0.0, c, x)) return RayTermination::TimeLimit;
        gliding = true;
        break;
      case ContactKind::Diffractive:
        if (!on_event(0.0, c, x)) return RayTermination::TimeLimit;
        break;
      case ContactKind::InfiniteOrder:
        on_event(0.0, c, x);
        return RayTermination::InfiniteOrderContact;
      case ContactKind::HigherOrder:
        break;  // not produced by classify_contact
    }
  }

  long events = 0;
  while (s < s_max) {
    if (gliding) {
      // In these domains a gliding ray never detaches: the boundary geodesic
      // of a circle stays glancing forever.
      const double radius = x.norm();
      const int dir = cross2(x, xi) >= 0 ? 1 : -1;
      const double angle0 = std::atan2(x.y(), x.x());
      if (!on_gliding(s, radius, angle0, dir, s_max - s)) {
        *s_end = s;
        return RayTermination::TimeLimit;
      }
      s = s_max;
      break;
    }
    const auto hit = next_hit(dom, x, xi);
    if (!hit || s + hit->s >= s_max) {
      const double len = s_max - s;
      on_interior(s, x, xi, len);
      s = s_max;
      break;
    }
    if (!on_interior(s, x, xi, hit->s)) {
      *s_end = s + hit->s;
      return RayTermination::TimeLimit;
    }
    s += hit->s;
    x = hit->x;
    *s_end = s;
    const ContactClass c = classify_contact(dom, x, xi);
    if (!on_event(s, c, x)) return RayTermination::TimeLimit;
    switch (c.kind) {
      case ContactKind::Hyperbolic:
        xi = reflect(dom, x, xi);
        break;
      case ContactKind::Diffractive:
        break;  // crosses into the interior unchanged
      case ContactKind::Gliding:
        gliding = true;
        break;
      case ContactKind::Corner:
        return RayTermination::CornerHit;
      case ContactKind::InfiniteOrder:
        return RayTermination::InfiniteOrderContact;
      case ContactKind::HigherOrder:
        break;
    }
    if (++events >= kMaxEvents) {
      return RayTermination::TimeLimit;  // s_end < s_max records the cap
    }
  }
  *s_end = s;
  return RayTermination::TimeLimit;
}

}  // namespace

std::optional<BoundaryHit> next_boundary_event(const Domain& dom, const Vec2& x,
                                               const Vec2& xi) {
  require_unit(xi);
  return next_hit(dom, x, xi.normalized());
}

std::optional<double> next_boundary_s(const Domain& dom, const Vec2& x,
                                      const Vec2& xi) {
  const auto hit = next_boundary_event(dom, x, xi);
  if (!hit) return std::nullopt;
  return hit->s;
}

ContactClass classify_contact(const Domain& dom, const Vec2& x_hit,
                              const Vec2& xi) {
  if (near_corner(dom, x_hit)) {
    return ContactClass{ContactKind::Corner, 0, 0, 0};
  }
  const Vec2 n = dom.boundary_normal(x_hit, 10 * on_tol(dom));
  const double xi_d = -xi.dot(n);
  if (std::abs(xi_d) > kTolGlance) {
    return ContactClass{ContactKind::Hyperbolic, xi_d, 1, 0};
  }
  // Glancing: expand the straight continuation in the boundary distance,
  // x_d(s) = alpha s^2 + O(s^3) with alpha = -2 * (signed curvature).
  switch (dom.kind()) {
    case DomainKind::Rectangle:
      return ContactClass{ContactKind::InfiniteOrder, xi_d, 0, 0};
    case DomainKind::Disk:
      return ContactClass{ContactKind::Gliding, xi_d, 2, -2.0 / dom.rout()};
    case DomainKind::Annulus: {
      const double rho = x_hit.norm();
      if (std::abs(rho - dom.rin()) < std::abs(rho - dom.rout())) {
        return ContactClass{ContactKind::Diffractive, xi_d, 2, 2.0 / dom.rin()};
      }
      return ContactClass{ContactKind::Gliding, xi_d, 2, -2.0 / dom.rout()};
    }
  }
  throw UnsupportedDomain("unreachable domain kind in classify_contact");
}

Vec2 reflect(const Domain& dom, const Vec2& x_hit, const Vec2& xi) {
  const Vec2 n = dom.boundary_normal(x_hit, 10 * on_tol(dom));
  return xi - 2.0 * xi.dot(n) * n;
}

PhasePoint glide_step(const Domain& dom, const Vec2& x_on, const Vec2& xi_tan,
                      double ds) {
  if (dom.kind() == DomainKind::Rectangle) {
    throw GlideOnFlatSide("gliding is undefined on flat boundary pieces");
  }
  const double rho = x_on.norm();
  const double radius =
      dom.kind() == DomainKind::Disk
          ? dom.rout()
          : (std::abs(rho - dom.rin()) < std::abs(rho - dom.rout())
                 ? dom.rin()
                 : dom.rout());
  const double cr = cross2(x_on, xi_tan);
  if (cr == 0) {
    throw DegenerateDirection("gliding direction is radial, not tangent");
  }
  const int dir = cr > 0 ? 1 : -1;
  const double phi = std::atan2(x_on.y(), x_on.x()) + dir * 2.0 * ds / radius;
  const Vec2 e{std::cos(phi), std::sin(phi)};
  return PhasePoint{radius * e, Vec2{-dir * e.y(), dir * e.x()}};
}

GeneralizedRay trace_generalized(const Domain& dom, const PhasePoint& rho0,
                                 double s_max) {
  if (!(s_max > 0)) throw ConfigInvalid("trace length s_max must be positive");
  GeneralizedRay ray;
  ray.s_max = s_max;
  double s_end = 0;
  ray.terminated_reason = walk_ray(
      dom, rho0, s_max,
      [&](double s0, const Vec2& x, const Vec2& xi, double len) {
        if (len > 0) {
          RayArc arc;
          arc.type = ArcType::Interior;
          arc.s0 = s0;
          arc.s_len = len;
          arc.x = x;
          arc.xi = xi;
          ray.arcs.push_back(arc);
        }
        return true;
      },
      [&](double s0, double radius, double angle0, int dir, double len) {
        RayArc arc;
        arc.type = ArcType::Gliding;
        arc.s0 = s0;
        arc.s_len = len;
        arc.radius = radius;
        arc.angle0 = angle0;
        arc.direction = dir;
        ray.arcs.push_back(arc);
        return true;
      },
      [&](double s, const ContactClass& c, const Vec2& x) {
        ray.events.push_back(RayEvent{s, c, x});
        return true;
      },
      &s_end);
  ray.s_end = s_end;
  return ray;
}

PhasePoint ray_evaluate(const GeneralizedRay& ray, double s) {
  if (ray.arcs.empty()) {
    throw EmptyTrajectory("ray has no arcs to evaluate");
  }
  s = std::clamp(s, 0.0, ray.s_end);
  // Last arc whose start is <= s; at an event parameter this selects the
  // post-event arc.
  std::size_t idx = ray.arcs.size() - 1;
  for (std::size_t i = 0; i < ray.arcs.size(); ++i) {
    if (ray.arcs[i].s0 > s) {
      idx = i == 0 ? 0 : i - 1;
      break;
    }
  }
  const RayArc& arc = ray.arcs[idx];
  const double ds = std::clamp(s - arc.s0, 0.0, arc.s_len);
  if (arc.type == ArcType::Interior) {
    return PhasePoint{arc.x + 2.0 * ds * arc.xi, arc.xi};
  }
  const double phi = arc.angle0 + arc.direction * 2.0 * ds / arc.radius;
  const Vec2 e{std::cos(phi), std::sin(phi)};
  return PhasePoint{arc.radius * e,
                    Vec2{-arc.direction * e.y(), arc.direction * e.x()}};
}

const char* to_string(GccReport::Verdict v) {
  switch (v) {
    case GccReport::Verdict::Satisfied:
      return "satisfied";
    case GccReport::Verdict::Violated:
      return "violated";
    case GccReport::Verdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

namespace {

// Boundary point with inward normal and ccw tangent at perimeter fraction w.
struct BoundaryFrame {
  Vec2 x, inward, tangent;
};

BoundaryFrame boundary_frame(const Domain& dom, double w) {
  switch (dom.kind()) {
    case DomainKind::Rectangle: {
      const double lx = dom.lx(), ly = dom.ly();
      double p = w * 2.0 * (lx + ly);
      if (p < lx) return {{p, 0}, {0, 1}, {1, 0}};
      p -= lx;
      if (p < ly) return {{lx, p}, {-1, 0}, {0, 1}};
      p -= ly;
      if (p < lx) return {{lx - p, ly}, {0, -1}, {-1, 0}};
      p -= lx;
      return {{0, ly - p}, {1, 0}, {0, -1}};
    }
    case DomainKind::Disk: {
      const double th = 2 * M_PI * w;
      const Vec2 e{std::cos(th), std::sin(th)};
      return {dom.rout() * e, -e, {-e.y(), e.x()}};
    }
    case DomainKind::Annulus: {
      const double po = 2 * M_PI * dom.rout();
      const double pin = 2 * M_PI * dom.rin();
      const double p = w * (po + pin);
      if (p < po) {
        const double th = p / dom.rout();
        const Vec2 e{std::cos(th), std::sin(th)};
        return {dom.rout() * e, -e, {-e.y(), e.x()}};
      }
      const double th = (p - po) / dom.rin();
      const Vec2 e{std::cos(th), std::sin(th)};
      return {dom.rin() * e, e, {-e.y(), e.x()}};
    }
  }
  throw UnsupportedDomain("unreachable domain kind in boundary_frame");
}

Vec2 interior_point(const Domain& dom, double u, double v) {
  switch (dom.kind()) {
    case DomainKind::Rectangle:
      return {u * dom.lx(), v * dom.ly()};
    case DomainKind::Disk: {
      const double r = dom.rout() * std::sqrt(u);
      const double th = 2 * M_PI * v;
      return {r * std::cos(th), r * std::sin(th)};
    }
    case DomainKind::Annulus: {
      const double a = dom.rin() * dom.rin();
      const double b = dom.rout() * dom.rout();
      const double r = std::sqrt(a + u * (b - a));
      const double th = 2 * M_PI * v;
      return {r * std::cos(th), r * std::sin(th)};
    }
  }
  throw UnsupportedDomain("unreachable domain kind in interior_point");
}

PhasePoint gcc_sample(const Domain& dom, std::uint64_t idx, int j) {
  if (j % 4 == 3) {
    // Boundary stratum; every 8th of these launches exactly tangentially so
    // the glancing branches of the flow get exercised too.
    const BoundaryFrame fr = boundary_frame(dom, halton(idx, 2));
    const int b_idx = j / 4;
    if (b_idx % 8 == 0) {
      const int sign = halton(idx, 5) < 0.5 ? 1 : -1;
      return {fr.x, sign * fr.tangent};
    }
    const double psi = M_PI * halton(idx, 3);
    return {fr.x, std::sin(psi) * fr.inward + std::cos(psi) * fr.tangent};
  }
  const Vec2 x = interior_point(dom, halton(idx, 2), halton(idx, 3));
  const double phi = 2 * M_PI * halton(idx, 5);
  return {x, {std::cos(phi), std::sin(phi)}};
}

}  // namespace

GccReport gcc_check(const Domain& dom, const ControlRegion& omega,
                    int n_samples, double s_max, std::uint64_t seed,
                    int workers) {
  if (n_samples <= 0) throw ConfigInvalid("gcc_check needs n_samples > 0");
  if (!(s_max > 0)) throw ConfigInvalid("gcc_check needs s_max > 0");

  enum Status : int { kControlled, kViolating, kCornerOut, kInfiniteOut };
  std::vector<int> status(n_samples, kViolating);
  std::vector<double> hit_s(n_samples, -1.0);
  std::vector<PhasePoint> starts(n_samples, PhasePoint{{0, 0}, {1, 0}});
  std::vector<std::exception_ptr> errors(n_samples);

  parallel_for(n_samples, workers, [&](int j) {
    try {
      const std::uint64_t idx = 1 + seed * 1000003ULL + std::uint64_t(j);
      const PhasePoint rho = gcc_sample(dom, idx, j);
      starts[j] = rho;
      if (omega.contains(dom, rho.x)) {
        status[j] = kControlled;
        hit_s[j] = 0;
        return;
      }
      std::optional<double> entry;
      double s_end = 0;
      const RayTermination term = walk_ray(
          dom, rho, s_max,
          [&](double s0, const Vec2& x, const Vec2& xi, double len) {
            const auto e = omega.first_entry_segment(dom, x, xi, len);
            if (e) {
              entry = s0 + *e;
              return false;
            }
            return true;
          },
          [&](double s0, double radius, double angle0, int dir, double len) {
            const auto e =
                omega.first_entry_arc(dom, radius, angle0, dir, len);
            if (e) {
              entry = s0 + *e;
              return false;
            }
            return true;
          },
          [&](double, const ContactClass&, const Vec2&) { return true; },
          &s_end);
      if (entry) {
        status[j] = kControlled;
        hit_s[j] = *entry;
      } else if (term == RayTermination::CornerHit) {
        status[j] = kCornerOut;
      } else if (term == RayTermination::InfiniteOrderContact) {
        status[j] = kInfiniteOut;
      } else {
        status[j] = kViolating;
      }
    } catch (...) {
      errors[j] = std::current_exception();
    }
  });
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  GccReport report;
  report.samples_total = n_samples;
  report.seed = seed;
  report.s_max = s_max;
  for (int j = 0; j < n_samples; ++j) {
    switch (status[j]) {
      case kControlled:
        report.worst_escape_time = std::max(report.worst_escape_time, hit_s[j]);
        break;
      case kViolating:
        ++report.n_violating;
        if (report.violating_rays.size() < 64) {
          report.violating_rays.push_back(starts[j]);
        }
        break;
      case kCornerOut:
        ++report.n_excluded_corner;
        break;
      case kInfiniteOut:
        ++report.n_excluded_infinite;
        break;
    }
  }
  const double excluded_frac =
      double(report.n_excluded_corner + report.n_excluded_infinite) /
      double(n_samples);
  if (report.n_violating > 0) {
    report.verdict = GccReport::Verdict::Violated;
  } else if (excluded_frac > 0.05) {
    report.verdict = GccReport::Verdict::Inconclusive;
  } else {
    report.verdict = GccReport::Verdict::Satisfied;
  }
  return report;
}

}  // namespace acoustolab
