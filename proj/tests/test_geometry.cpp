#include <cmath>
#include <vector>

#include "acoustolab/errors.hpp"
#include "acoustolab/geometry.hpp"
#include "acoustolab/sampling.hpp"
#include "doctest.h"

using namespace acoustolab;

TEST_CASE("domain factories validate their parameters") {
  CHECK_THROWS_AS(Domain::rectangle(0, 1), ConfigInvalid);
  CHECK_THROWS_AS(Domain::rectangle(1, -2), ConfigInvalid);
  CHECK_THROWS_AS(Domain::disk(0), ConfigInvalid);
  CHECK_THROWS_AS(Domain::annulus(0.5, 0.5), ConfigInvalid);
  CHECK_THROWS_AS(Domain::annulus(-0.1, 1), ConfigInvalid);
  CHECK_NOTHROW(Domain::annulus(0.5, 1.0));
}

TEST_CASE("boundary distance: rectangle") {
  const Domain dom = Domain::rectangle(2, 1);
  CHECK(dom.boundary_distance({1.0, 0.5}) == doctest::Approx(0.5));
  CHECK(dom.boundary_distance({0.25, 0.5}) == doctest::Approx(0.25));
  CHECK(dom.boundary_distance({1.0, 0.1}) == doctest::Approx(0.1));
  CHECK(dom.boundary_distance({0.0, 0.5}) == doctest::Approx(0.0));
  // outside: negative, Euclidean to the nearest point (corner region)
  CHECK(dom.boundary_distance({-0.3, -0.4}) == doctest::Approx(-0.5));
  CHECK(dom.boundary_distance({2.5, 0.5}) == doctest::Approx(-0.5));
  CHECK(dom.area() == doctest::Approx(2.0));
  CHECK(dom.diameter() == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("boundary distance: disk and annulus") {
  const Domain disk = Domain::disk(2);
  CHECK(disk.boundary_distance({0, 0}) == doctest::Approx(2.0));
  CHECK(disk.boundary_distance({1.2, 0}) == doctest::Approx(0.8));
  CHECK(disk.boundary_distance({0, -3}) == doctest::Approx(-1.0));

  const Domain ann = Domain::annulus(0.5, 1.0);
  CHECK(ann.boundary_distance({0.75, 0}) == doctest::Approx(0.25));
  CHECK(ann.boundary_distance({0.6, 0}) == doctest::Approx(0.1));
  CHECK(ann.boundary_distance({0, 0.95}) == doctest::Approx(0.05));
  CHECK(ann.boundary_distance({0.25, 0}) == doctest::Approx(-0.25));
  CHECK(ann.boundary_distance({0, 1.5}) == doctest::Approx(-0.5));
  CHECK(ann.area() == doctest::Approx(M_PI * 0.75));
}

TEST_CASE("boundary normals point outward") {
  const Domain rect = Domain::rectangle(2, 1);
  CHECK((rect.boundary_normal({0.0, 0.5}) - Vec2{-1, 0}).norm() == doctest::Approx(0));
  CHECK((rect.boundary_normal({2.0, 0.5}) - Vec2{1, 0}).norm() == doctest::Approx(0));
  CHECK((rect.boundary_normal({1.0, 0.0}) - Vec2{0, -1}).norm() == doctest::Approx(0));
  CHECK((rect.boundary_normal({1.0, 1.0}) - Vec2{0, 1}).norm() == doctest::Approx(0));
  CHECK_THROWS_AS(rect.boundary_normal({1.0, 0.5}), NotOnBoundary);

  const Domain disk = Domain::disk(1);
  const Vec2 p{std::cos(0.3), std::sin(0.3)};
  CHECK((disk.boundary_normal(p) - p).norm() == doctest::Approx(0).epsilon(1e-12));

  const Domain ann = Domain::annulus(0.5, 1.0);
  // inner boundary: outward from the domain means toward the hole
  CHECK((ann.boundary_normal({0.5, 0.0}) - Vec2{-1, 0}).norm() == doctest::Approx(0));
  CHECK((ann.boundary_normal({0.0, 1.0}) - Vec2{0, 1}).norm() == doctest::Approx(0));
}

TEST_CASE("collar damping profile: worked value and support") {
  const Domain disk = Domain::disk(1);
  const DampingField b = DampingField::boundary_collar(0.2, 1.0, 2.0);
  // depth 0.1 inside a width-0.2 collar: ramp value (1 - 0.1/0.2)^2 = 0.25
  CHECK(b(disk, {0.9, 0.0}) == doctest::Approx(0.25));
  CHECK(b(disk, {1.0, 0.0}) == doctest::Approx(1.0));   // on the boundary
  CHECK(b(disk, {0.0, 0.0}) == doctest::Approx(0.0));   // deep interior
  CHECK(b(disk, {0.8, 0.0}) == doctest::Approx(0.0));   // at the ramp foot
  CHECK(b.in_support(disk, {0.9, 0.0}));
  CHECK_FALSE(b.in_support(disk, {0.5, 0.0}));
  // support is open, {b > 0}; width 0.25 keeps the foot arithmetic exact
  const DampingField b4 = DampingField::boundary_collar(0.25, 1.0, 2.0);
  CHECK_FALSE(b4.in_support(disk, {0.75, 0.0}));
}

TEST_CASE("ball damping profile ramps from the center") {
  const Domain rect = Domain::rectangle(1, 1);
  const DampingField b = DampingField::interior_ball({0.5, 0.5}, 0.2, 3.0, 1.0);
  CHECK(b(rect, {0.5, 0.5}) == doctest::Approx(3.0));
  CHECK(b(rect, {0.6, 0.5}) == doctest::Approx(1.5));  // halfway down the ramp
  CHECK(b(rect, {0.7, 0.5}) == doctest::Approx(0.0));
  CHECK(b(rect, {0.9, 0.9}) == doctest::Approx(0.0));
  CHECK(DampingField::zero()(rect, {0.5, 0.5}) == 0.0);
  CHECK(DampingField::constant(2.5)(rect, {0.1, 0.9}) == doctest::Approx(2.5));
}

TEST_CASE("damping factories validate") {
  CHECK_THROWS_AS(DampingField::constant(-1), ConfigInvalid);
  CHECK_THROWS_AS(DampingField::boundary_collar(0, 1), ConfigInvalid);
  CHECK_THROWS_AS(DampingField::boundary_collar(0.1, -1), ConfigInvalid);
  CHECK_THROWS_AS(DampingField::interior_ball({0, 0}, -0.1, 1), ConfigInvalid);
}

TEST_CASE("control region membership") {
  const Domain rect = Domain::rectangle(1, 1);
  const ControlRegion collar = ControlRegion::boundary_collar(0.2);
  CHECK(collar.contains(rect, {0.1, 0.5}));
  CHECK(collar.contains(rect, {0.5, 0.2}));   // closed: depth == width counts
  CHECK(collar.contains(rect, {0.0, 0.5}));   // boundary points count
  CHECK_FALSE(collar.contains(rect, {0.5, 0.5}));
  CHECK_FALSE(collar.contains(rect, {-0.1, 0.5}));  // outside the domain

  const ControlRegion ball = ControlRegion::ball({0.5, 0.5}, 0.25);
  CHECK(ball.contains(rect, {0.5, 0.5}));
  CHECK(ball.contains(rect, {0.75, 0.5}));
  CHECK_FALSE(ball.contains(rect, {0.76, 0.5}));

  const Domain ann = Domain::annulus(0.5, 1.0);
  const ControlRegion band = ControlRegion::radial_band(0.5, 0.6);
  CHECK(band.contains(ann, {0.55, 0.0}));
  CHECK(band.contains(ann, {0.0, 0.6}));
  CHECK_FALSE(band.contains(ann, {0.7, 0.0}));
}

TEST_CASE("damping support resolves to the matching region") {
  const Domain rect = Domain::rectangle(1, 1);
  const DampingField collar = DampingField::boundary_collar(0.3, 2.0);
  const ControlRegion rc = ControlRegion::damping_support(collar);
  CHECK(rc.contains(rect, {0.1, 0.5}));
  CHECK_FALSE(rc.contains(rect, {0.5, 0.5}));

  const ControlRegion rz =
      ControlRegion::damping_support(DampingField::zero());
  CHECK_FALSE(rz.contains(rect, {0.5, 0.5}));
  CHECK_FALSE(rz.contains(rect, {0.0, 0.0}));

  const ControlRegion rall =
      ControlRegion::damping_support(DampingField::constant(1.0));
  CHECK(rall.contains(rect, {0.5, 0.5}));
  CHECK(rall.contains(rect, {0.0, 0.0}));
  CHECK_FALSE(rall.contains(rect, {1.5, 0.5}));  // still clipped to the domain
}

namespace {

// Scan-based reference for first-entry queries.  The closed-form answer s*
// must (a) be a member, (b) have no member point more than one scan step
// before it; if the closed form reports no entry the scan must agree.
void check_entry_against_scan(const Domain& dom, const ControlRegion& omega,
                              const Vec2& x0, const Vec2& xi, double s_len) {
  const auto exact = omega.first_entry_segment(dom, x0, xi, s_len);
  const double step = 1e-4;
  double first_scan = -1;
  for (double s = 0; s <= s_len; s += step) {
    if (omega.contains(dom, x0 + 2 * s * xi)) {
      first_scan = s;
      break;
    }
  }
  if (exact) {
    CHECK(*exact >= 0);
    CHECK(*exact <= s_len);
    CHECK(omega.contains(dom, x0 + 2 * (*exact) * xi));
    if (first_scan >= 0) CHECK(*exact <= first_scan + 1e-12);
  } else {
    CHECK(first_scan == -1);
  }
}

}  // namespace

TEST_CASE("first-entry segment queries agree with a fine scan") {
  Rng rng(20260814);
  const Domain domains[] = {Domain::rectangle(1.5, 1.0), Domain::disk(1.0),
                            Domain::annulus(0.5, 1.2)};
  for (const Domain& dom : domains) {
    std::vector<ControlRegion> regions;
    regions.push_back(ControlRegion::boundary_collar(0.2));
    regions.push_back(ControlRegion::ball({0.4, 0.3}, 0.25));
    if (dom.kind() != DomainKind::Rectangle) {
      regions.push_back(ControlRegion::radial_band(0.5, 0.7));
    }
    for (const ControlRegion& omega : regions) {
      int tested = 0;
      while (tested < 60) {
        const Vec2 x0{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
        if (!dom.contains(x0)) continue;
        const double phi = rng.uniform(0, 2 * M_PI);
        const Vec2 xi{std::cos(phi), std::sin(phi)};
        check_entry_against_scan(dom, omega, x0, xi, rng.uniform(0.05, 2.0));
        ++tested;
      }
    }
  }
}

TEST_CASE("first-entry arc queries agree with a fine scan") {
  Rng rng(777);
  const Domain dom = Domain::disk(1.0);
  std::vector<ControlRegion> regions;
  regions.push_back(ControlRegion::ball({0.6, 0.0}, 0.45));
  regions.push_back(ControlRegion::boundary_collar(0.15));
  regions.push_back(ControlRegion::ball({0.2, 0.2}, 0.25));  // misses the rim
  for (const ControlRegion& omega : regions) {
    for (int t = 0; t < 40; ++t) {
      const double radius = 1.0;
      const double angle0 = rng.uniform(0, 2 * M_PI);
      const int dir = rng.uniform() < 0.5 ? 1 : -1;
      const double s_len = rng.uniform(0.1, 2 * M_PI);
      const auto exact =
          omega.first_entry_arc(dom, radius, angle0, dir, s_len);
      const double step = 1e-4;
      double first_scan = -1;
      for (double s = 0; s <= s_len; s += step) {
        const double phi = angle0 + dir * 2 * s / radius;
        const Vec2 p{radius * std::cos(phi), radius * std::sin(phi)};
        if (omega.contains(dom, p)) {
          first_scan = s;
          break;
        }
      }
      if (exact) {
        const double phi = angle0 + dir * 2 * (*exact) / radius;
        const Vec2 p{radius * std::cos(phi), radius * std::sin(phi)};
        CHECK(omega.contains(dom, p));
        if (first_scan >= 0) CHECK(*exact <= first_scan + 1e-12);
      } else {
        CHECK(first_scan == -1);
      }
    }
  }
}

TEST_CASE("halton and rng are deterministic") {
  CHECK(halton(1, 2) == doctest::Approx(0.5));
  CHECK(halton(2, 2) == doctest::Approx(0.25));
  CHECK(halton(3, 2) == doctest::Approx(0.75));
  CHECK(halton(4, 2) == doctest::Approx(0.125));
  CHECK(halton(1, 3) == doctest::Approx(1.0 / 3.0));
  CHECK(halton(2, 3) == doctest::Approx(2.0 / 3.0));

  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  const double g = a.normal();
  CHECK(g == b.normal());
}
