#include <cmath>
#include <vector>

#include "acoustolab/errors.hpp"
#include "acoustolab/rays.hpp"
#include "acoustolab/sampling.hpp"
#include "contact_oracle.hpp"
#include "doctest.h"

using namespace acoustolab;
using acoustolab_test::ContactCase;
using acoustolab_test::contact_cases;
using acoustolab_test::fd_classify;

namespace {

double cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

}  // namespace

TEST_CASE("boundary intersections in closed form") {
  const Domain rect = Domain::rectangle(1, 1);
  auto hit = next_boundary_event(rect, {0.25, 0.5}, {1, 0});
  REQUIRE(hit.has_value());
  CHECK(hit->s == doctest::Approx(0.375));
  CHECK(hit->x.x() == doctest::Approx(1.0));
  CHECK(hit->x.y() == doctest::Approx(0.5));

  const Domain disk = Domain::disk(1.0);
  hit = next_boundary_event(disk, {0, 0}, {0.6, 0.8});
  REQUIRE(hit.has_value());
  CHECK(hit->s == doctest::Approx(0.5));
  CHECK(hit->x.norm() == doctest::Approx(1.0));

  const Domain ann = Domain::annulus(0.5, 1.0);
  hit = next_boundary_event(ann, {0.75, 0}, {-1, 0});
  REQUIRE(hit.has_value());
  CHECK(hit->s == doctest::Approx(0.125));
  CHECK(hit->x.x() == doctest::Approx(0.5));

  // from a boundary point the trivial root is discarded
  hit = next_boundary_event(disk, {1, 0}, {-1, 0});
  REQUIRE(hit.has_value());
  CHECK(hit->s == doctest::Approx(1.0));
  CHECK(hit->x.x() == doctest::Approx(-1.0));

  CHECK_THROWS_AS(next_boundary_event(disk, {0, 0}, {0.5, 0.5}),
                  DegenerateDirection);
}

TEST_CASE("specular reflection") {
  const Domain rect = Domain::rectangle(1, 1);
  const Vec2 out = reflect(rect, {1.0, 0.5}, Vec2{0.6, 0.8}.normalized());
  CHECK(out.x() == doctest::Approx(-0.6));
  CHECK(out.y() == doctest::Approx(0.8));
  const Domain disk = Domain::disk(1.0);
  const Vec2 rad = reflect(disk, {0, 1}, {0, 1});
  CHECK(rad.x() == doctest::Approx(0));
  CHECK(rad.y() == doctest::Approx(-1));
}

TEST_CASE("contact classification: curvature sign cases") {
  const Domain disk = Domain::disk(1.0);
  ContactClass c = classify_contact(disk, {1, 0}, {0, 1});
  CHECK(c.kind == ContactKind::Gliding);
  CHECK(c.alpha == doctest::Approx(-2.0));
  CHECK(c.k == 2);

  const Domain ann = Domain::annulus(0.5, 1.0);
  c = classify_contact(ann, {0.5, 0}, {0, 1});
  CHECK(c.kind == ContactKind::Diffractive);
  CHECK(c.alpha == doctest::Approx(4.0));
  c = classify_contact(ann, {0, 1.0}, {1, 0});
  CHECK(c.kind == ContactKind::Gliding);
  CHECK(c.alpha == doctest::Approx(-2.0));

  const Domain rect = Domain::rectangle(1, 1);
  c = classify_contact(rect, {0.5, 0}, {1, 0});
  CHECK(c.kind == ContactKind::InfiniteOrder);
  c = classify_contact(rect, {0.5, 1.0}, Vec2{0.6, 0.8}.normalized());
  CHECK(c.kind == ContactKind::Hyperbolic);
  CHECK(c.xi_d == doctest::Approx(-0.8));
  c = classify_contact(rect, {1.0 - 1e-12, 1.0}, {1, 0});
  CHECK(c.kind == ContactKind::Corner);
}

TEST_CASE("classification agrees with the distance-expansion oracle") {
  int glancing_seen = 0;
  for (const ContactCase& cc : contact_cases(250, 424242)) {
    double alpha_fd = 0;
    const ContactKind expected = fd_classify(cc.dom, cc.x, cc.xi, &alpha_fd);
    const ContactClass got = classify_contact(cc.dom, cc.x, cc.xi);
    CHECK(got.kind == expected);
    if (expected != ContactKind::Hyperbolic &&
        expected != ContactKind::InfiniteOrder) {
      ++glancing_seen;
      CHECK(got.alpha == doctest::Approx(alpha_fd).epsilon(0.05));
    }
  }
  CHECK(glancing_seen > 20);  // the tangential stratum actually fired
}

TEST_CASE("trace: arcs tile the parameter interval") {
  const Domain rect = Domain::rectangle(1.3, 0.9);
  const GeneralizedRay ray = trace_generalized(
      rect, {{0.3, 0.4}, Vec2{0.8, 0.6}.normalized()}, 12.0);
  REQUIRE(!ray.arcs.empty());
  CHECK(ray.arcs.front().s0 == 0.0);
  for (std::size_t i = 1; i < ray.arcs.size(); ++i) {
    CHECK(ray.arcs[i].s0 ==
          doctest::Approx(ray.arcs[i - 1].s0 + ray.arcs[i - 1].s_len)
              .epsilon(1e-12));
  }
  const RayArc& last = ray.arcs.back();
  CHECK(last.s0 + last.s_len == doctest::Approx(ray.s_end));
  CHECK(ray.s_end == doctest::Approx(12.0));
}

TEST_CASE("trace invariants: unit speed and angular momentum") {
  Rng rng(90210);
  const Domain domains[] = {Domain::rectangle(1.3, 0.9), Domain::disk(1.0),
                            Domain::annulus(0.5, 1.0)};
  for (const Domain& dom : domains) {
    int traced = 0;
    while (traced < 50) {
      const Vec2 x{rng.uniform(-1.0, 1.4), rng.uniform(-1.0, 1.0)};
      if (dom.boundary_distance(x) < 0.05) continue;
      const double phi = rng.uniform(0, 2 * M_PI);
      const GeneralizedRay ray =
          trace_generalized(dom, {x, {std::cos(phi), std::sin(phi)}}, 15.0);
      ++traced;
      double ell0 = -1;
      for (const RayArc& arc : ray.arcs) {
        if (arc.type != ArcType::Interior) continue;
        CHECK(std::abs(arc.xi.norm() - 1.0) <= 1e-12);
        if (dom.kind() != DomainKind::Rectangle) {
          const double ell = std::abs(cross2(arc.x, arc.xi));
          if (ell0 < 0) ell0 = ell;
          CHECK(ell == doctest::Approx(ell0).epsilon(1e-10));
        }
      }
    }
  }
}

TEST_CASE("group property: restarting mid-flight matches the original") {
  Rng rng(1618);
  const Domain domains[] = {Domain::rectangle(1.3, 0.9), Domain::disk(1.0),
                            Domain::annulus(0.5, 1.0)};
  for (const Domain& dom : domains) {
    int usable = 0, tried = 0;
    while (usable < 12 && tried < 100) {
      ++tried;
      const Vec2 x{rng.uniform(-1.0, 1.4), rng.uniform(-1.0, 1.0)};
      if (dom.boundary_distance(x) < 0.05) continue;
      const double phi = rng.uniform(0, 2 * M_PI);
      const double s_max = 9.0;
      const GeneralizedRay ray =
          trace_generalized(dom, {x, {std::cos(phi), std::sin(phi)}}, s_max);
      if (ray.terminated_reason != RayTermination::TimeLimit ||
          ray.s_end < s_max) {
        continue;
      }
      const double s1 = rng.uniform(2.0, 5.0);
      const PhasePoint mid = ray_evaluate(ray, s1);
      const GeneralizedRay tail = trace_generalized(dom, mid, s_max - s1);
      for (double t : {0.0, 0.7, 1.9, 3.3, s_max - s1}) {
        const PhasePoint a = ray_evaluate(ray, s1 + t);
        const PhasePoint b = ray_evaluate(tail, t);
        CHECK((a.x - b.x).norm() <= 1e-8);
        CHECK((a.xi - b.xi).norm() <= 1e-8);
      }
      ++usable;
    }
    CHECK(usable >= 12);
  }
}

TEST_CASE("time reversal returns to the start") {
  Rng rng(2718);
  const Domain domains[] = {Domain::rectangle(1.3, 0.9), Domain::disk(1.0),
                            Domain::annulus(0.5, 1.0)};
  for (const Domain& dom : domains) {
    int usable = 0, tried = 0;
    while (usable < 12 && tried < 100) {
      ++tried;
      const Vec2 x{rng.uniform(-1.0, 1.4), rng.uniform(-1.0, 1.0)};
      if (dom.boundary_distance(x) < 0.05) continue;
      const double phi = rng.uniform(0, 2 * M_PI);
      const double s_max = 7.0;
      const GeneralizedRay fwd =
          trace_generalized(dom, {x, {std::cos(phi), std::sin(phi)}}, s_max);
      if (fwd.terminated_reason != RayTermination::TimeLimit ||
          fwd.s_end < s_max) {
        continue;
      }
      const PhasePoint end = ray_evaluate(fwd, s_max);
      const GeneralizedRay back =
          trace_generalized(dom, {end.x, -end.xi}, s_max);
      if (back.s_end < s_max) continue;
      const PhasePoint home = ray_evaluate(back, s_max);
      CHECK((home.x - x).norm() <= 1e-8);
      CHECK((home.xi + Vec2{std::cos(phi), std::sin(phi)}).norm() <= 1e-8);
      ++usable;
    }
    CHECK(usable >= 12);
  }
}

TEST_CASE("gliding: tangential launch follows the rim") {
  const Domain disk = Domain::disk(1.0);
  const GeneralizedRay ray = trace_generalized(disk, {{1, 0}, {0, 1}}, 10.0);
  REQUIRE(ray.arcs.size() == 1);
  CHECK(ray.arcs[0].type == ArcType::Gliding);
  REQUIRE(!ray.events.empty());
  CHECK(ray.events[0].contact.kind == ContactKind::Gliding);
  CHECK(ray.events[0].s == 0.0);
  // arc length 2s: the quarter turn sits at s = pi/4
  const PhasePoint q = ray_evaluate(ray, M_PI / 4);
  CHECK((q.x - Vec2{0, 1}).norm() <= 1e-12);
  CHECK((q.xi - Vec2{-1, 0}).norm() <= 1e-12);
  const PhasePoint h = ray_evaluate(ray, M_PI / 2);
  CHECK((h.x - Vec2{-1, 0}).norm() <= 1e-12);
  // |x| stays on the rim everywhere
  for (double s = 0; s < 10.0; s += 0.37) {
    CHECK(std::abs(ray_evaluate(ray, s).x.norm() - 1.0) <= 1e-12);
  }
}

TEST_CASE("diffractive tangency crosses the inner circle's shadow") {
  const Domain ann = Domain::annulus(0.5, 1.0);
  const GeneralizedRay ray = trace_generalized(ann, {{0.5, 0}, {0, 1}}, 5.0);
  REQUIRE(ray.events.size() >= 2);
  CHECK(ray.events[0].s == 0.0);
  CHECK(ray.events[0].contact.kind == ContactKind::Diffractive);
  // straight continuation x = 0.5 meets the outer circle at s = sqrt(3)/4
  CHECK(ray.events[1].s == doctest::Approx(std::sqrt(3.0) / 4));
  CHECK(ray.events[1].contact.kind == ContactKind::Hyperbolic);
  CHECK(ray.arcs[0].type == ArcType::Interior);
}

TEST_CASE("boundary starts: outward states reflect at s = 0") {
  const Domain rect = Domain::rectangle(1, 1);
  const GeneralizedRay ray =
      trace_generalized(rect, {{0.0, 0.5}, {-1, 0}}, 2.0);
  REQUIRE(!ray.events.empty());
  CHECK(ray.events[0].s == 0.0);
  CHECK(ray.events[0].contact.kind == ContactKind::Hyperbolic);
  const PhasePoint q = ray_evaluate(ray, 0.25);
  CHECK(q.x.x() == doctest::Approx(0.5));
  CHECK(q.xi.x() == doctest::Approx(1.0));
}

TEST_CASE("terminating contacts: corners and flat tangencies") {
  const Domain rect = Domain::rectangle(1, 1);
  const GeneralizedRay corner = trace_generalized(
      rect, {{0.5, 0.5}, Vec2{1, 1}.normalized()}, 5.0);
  CHECK(corner.terminated_reason == RayTermination::CornerHit);
  CHECK(corner.s_end == doctest::Approx(std::sqrt(0.5) / 2));
  CHECK(corner.events.back().contact.kind == ContactKind::Corner);

  const GeneralizedRay flat =
      trace_generalized(rect, {{0.5, 0.0}, {1, 0}}, 5.0);
  CHECK(flat.terminated_reason == RayTermination::InfiniteOrderContact);
  CHECK(flat.s_end == 0.0);
}

TEST_CASE("trace input validation") {
  const Domain rect = Domain::rectangle(1, 1);
  CHECK_THROWS_AS(trace_generalized(rect, {{0.5, 0.5}, {1, 1}}, 5.0),
                  DegenerateDirection);
  CHECK_THROWS_AS(trace_generalized(rect, {{2.5, 0.5}, {1, 0}}, 5.0),
                  ConfigInvalid);
  CHECK_THROWS_AS(trace_generalized(rect, {{0.5, 0.5}, {1, 0}}, 0.0),
                  ConfigInvalid);
  CHECK_THROWS_AS(ray_evaluate(GeneralizedRay{}, 1.0), EmptyTrajectory);
  CHECK_THROWS_AS(glide_step(rect, {0.5, 0.0}, {1, 0}, 0.1), GlideOnFlatSide);
}

TEST_CASE("geometric control: verdicts on the three reference setups") {
  // disk with a full boundary collar: every ray meets it quickly
  const GccReport disk_ok =
      gcc_check(Domain::disk(1.0), ControlRegion::boundary_collar(0.2), 300,
                10.0, 1);
  CHECK(disk_ok.verdict == GccReport::Verdict::Satisfied);
  CHECK(disk_ok.n_violating == 0);
  CHECK(disk_ok.worst_escape_time < 10.0);

  // interior ball in a rectangle: bouncing-ball rays miss it forever
  const GccReport rect_bad =
      gcc_check(Domain::rectangle(1, 1), ControlRegion::ball({0.5, 0.5}, 0.2),
                300, 10.0, 1);
  CHECK(rect_bad.verdict == GccReport::Verdict::Violated);
  CHECK(rect_bad.n_violating > 0);
  REQUIRE(!rect_bad.violating_rays.empty());
  // every reported witness genuinely stays outside the ball
  const ControlRegion ball = ControlRegion::ball({0.5, 0.5}, 0.2);
  for (const PhasePoint& w : rect_bad.violating_rays) {
    const GeneralizedRay ray = trace_generalized(Domain::rectangle(1, 1), w,
                                                 10.0);
    for (const RayArc& arc : ray.arcs) {
      if (arc.type != ArcType::Interior) continue;
      CHECK_FALSE(ball.first_entry_segment(Domain::rectangle(1, 1), arc.x,
                                           arc.xi, arc.s_len)
                      .has_value());
    }
  }

  // inner-collar control of the annulus: whispering-gallery rays evade it
  const GccReport ann_bad = gcc_check(
      Domain::annulus(0.5, 1.0), ControlRegion::radial_band(0.5, 0.65), 300,
      10.0, 1);
  CHECK(ann_bad.verdict == GccReport::Verdict::Violated);
  CHECK(ann_bad.n_violating > 0);
}

TEST_CASE("geometric control: determinism and worker invariance") {
  const Domain dom = Domain::rectangle(1, 1);
  const ControlRegion omega = ControlRegion::ball({0.3, 0.4}, 0.25);
  const GccReport a = gcc_check(dom, omega, 400, 12.0, 5, 1);
  const GccReport b = gcc_check(dom, omega, 400, 12.0, 5, 1);
  const GccReport c = gcc_check(dom, omega, 400, 12.0, 5, 3);
  CHECK(a.n_violating == b.n_violating);
  CHECK(a.n_violating == c.n_violating);
  CHECK(a.worst_escape_time == b.worst_escape_time);
  CHECK(a.worst_escape_time == c.worst_escape_time);
  REQUIRE(a.violating_rays.size() == c.violating_rays.size());
  for (std::size_t i = 0; i < a.violating_rays.size(); ++i) {
    CHECK((a.violating_rays[i].x - c.violating_rays[i].x).norm() == 0.0);
  }
  // a different seed samples differently
  const GccReport d = gcc_check(dom, omega, 400, 12.0, 6, 1);
  CHECK((d.n_violating != a.n_violating ||
         d.worst_escape_time != a.worst_escape_time));
}

TEST_CASE("gcc rejects bad parameters") {
  const Domain dom = Domain::disk(1.0);
  const ControlRegion omega = ControlRegion::boundary_collar(0.2);
  CHECK_THROWS_AS(gcc_check(dom, omega, 0, 10.0), ConfigInvalid);
  CHECK_THROWS_AS(gcc_check(dom, omega, 10, -1.0), ConfigInvalid);
}
