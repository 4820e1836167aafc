#pragma once

// Generalized bicharacteristic flow for the flat metric: straight interior
// transport x(s) = x0 + 2 s xi (Hamiltonian parameter, |dx/ds| = 2), specular
// reflection at hyperbolic boundary contacts, curvature-based classification
// at glancing contacts, gliding flow along circular boundary components, and
// the geometric-control certifier built on top.
//
// Contact classification at a glancing point follows the sign of alpha in the
// normal expansion x_d(s) = alpha s^2 + O(s^3) of the straight continuation:
// alpha > 0 (inner circle of the annulus, alpha = +2/Rin) means diffractive -
// the ray re-enters the domain; alpha < 0 (outer circles, alpha = -2/R) means
// gliding - the generalized ray follows the boundary geodesic.  Flat sides
// give alpha = 0: infinite-order tangency, excluded.

#include <cstdint>
#include <optional>
#include <vector>

#include "acoustolab/geometry.hpp"

namespace acoustolab {

struct PhasePoint {
  Vec2 x;
  Vec2 xi;  // |xi| = 1 on the characteristic set
};

enum class ContactKind {
  Hyperbolic,
  Diffractive,
  Gliding,
  HigherOrder,  // representable but untriggered: circles give k=2, lines k=inf
  Corner,
  InfiniteOrder
};

struct ContactClass {
  ContactKind kind;
  double xi_d = 0;   // normal frequency -xi.n
  int k = 0;         // contact order (2 on circles)
  double alpha = 0;  // leading coefficient of x_d(s)
};

enum class ArcType { Interior, Gliding };

struct RayArc {
  ArcType type = ArcType::Interior;
  double s0 = 0, s_len = 0;
  Vec2 x{0, 0}, xi{0, 0};  // interior arcs
  double radius = 0;       // gliding arcs: circle |x| = radius
  double angle0 = 0;
  int direction = 0;       // +1 ccw, -1 cw
};

struct RayEvent {
  double s;
  ContactClass contact;
  Vec2 x;
};

enum class RayTermination { TimeLimit, CornerHit, InfiniteOrderContact };

struct GeneralizedRay {
  std::vector<RayArc> arcs;
  std::vector<RayEvent> events;
  double s_max = 0;  // requested
  double s_end = 0;  // reached (< s_max only on early termination)
  RayTermination terminated_reason = RayTermination::TimeLimit;
};

// Exact first boundary intersection of x + 2 s xi, s > 0.  nullopt only in
// degenerate situations (e.g. tangent start with no forward crossing).
// Throws DegenerateDirection unless | |xi| - 1 | <= 1e-10.
std::optional<double> next_boundary_s(const Domain& dom, const Vec2& x,
                                      const Vec2& xi);
struct BoundaryHit {
  double s;
  Vec2 x;
};
std::optional<BoundaryHit> next_boundary_event(const Domain& dom, const Vec2& x,
                                               const Vec2& xi);

// x_hit on the boundary within tolerance; throws NotOnBoundary otherwise.
ContactClass classify_contact(const Domain& dom, const Vec2& x_hit,
                              const Vec2& xi);

Vec2 reflect(const Domain& dom, const Vec2& x_hit, const Vec2& xi);

// Advance a gliding state along its boundary circle by Hamiltonian parameter
// ds (arc length 2 ds).  Throws GlideOnFlatSide on the rectangle.
PhasePoint glide_step(const Domain& dom, const Vec2& x_on, const Vec2& xi_tan,
                      double ds);

GeneralizedRay trace_generalized(const Domain& dom, const PhasePoint& rho0,
                                 double s_max);

// State at parameter s (clamped to [0, s_end]); at event parameters the
// post-event state is returned.
PhasePoint ray_evaluate(const GeneralizedRay& ray, double s);

struct GccReport {
  enum class Verdict { Satisfied, Violated, Inconclusive };
  Verdict verdict = Verdict::Inconclusive;
  int samples_total = 0;
  int n_violating = 0;
  int n_excluded_corner = 0;
  int n_excluded_infinite = 0;
  double worst_escape_time = 0;  // max first-entry s over controlled samples
  std::vector<PhasePoint> violating_rays;  // first 64 witnesses
  std::uint64_t seed = 0;
  double s_max = 0;
};

const char* to_string(GccReport::Verdict v);

// Low-discrepancy phase-space sampling (3/4 interior, 1/4 boundary including
// exact-tangential directions), exact first-entry queries along every arc.
GccReport gcc_check(const Domain& dom, const ControlRegion& omega,
                    int n_samples, double s_max, std::uint64_t seed = 0,
                    int workers = 1);

}  // namespace acoustolab
