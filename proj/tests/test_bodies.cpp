#include <doctest.h>

#include <cmath>

#include "fplab/bodies.hpp"

using namespace fplab;

namespace {

Subspace plane_subspace(int d) {
  Mat b = Mat::Zero(d, 2);
  b(0, 0) = 1.0;
  b(1, 1) = 1.0;
  return Subspace(b);
}

// Exhaustive active-set oracle for projection onto two halfspaces.
Vec two_halfspace_oracle(const std::vector<Halfspace>& faces, const Vec& x) {
  std::vector<Vec> candidates{x};
  for (const auto& f : faces)
    candidates.push_back(x - (f.normal.dot(x) - f.offset) * f.normal);
  {
    Mat A(2, x.size());
    A.row(0) = faces[0].normal.transpose();
    A.row(1) = faces[1].normal.transpose();
    Vec rhs(2);
    rhs << faces[0].normal.dot(x) - faces[0].offset, faces[1].normal.dot(x) - faces[1].offset;
    const Mat AAt = A * A.transpose();
    if (std::abs(AAt.determinant()) > 1e-12)
      candidates.push_back(x - A.transpose() * AAt.ldlt().solve(rhs));
  }
  Vec best;
  double best_dist = kInf;
  for (const Vec& p : candidates) {
    bool feasible = true;
    for (const auto& f : faces) feasible = feasible && f.normal.dot(p) <= f.offset + 1e-9;
    if (feasible && (p - x).norm() < best_dist) {
      best_dist = (p - x).norm();
      best = p;
    }
  }
  return best;
}

// Membership-only bisection for the ray extent; independent of ray_max.
double extent_by_membership(const ConvexBody& body, const Vec& x, const Vec& u) {
  double lo = 0.0, hi = 1.0;
  while (body.contains(x + hi * u, 0.0) && hi < 1e7) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (body.contains(x + mid * u, 0.0) ? lo : hi) = mid;
  }
  return lo;
}

// Dense angular sampling in the symmetry plane with golden-section
// refinement; valid for on-axis paraboloid points by rotational symmetry.
double paraboloid_boundary_oracle(const SolidParaboloid& body, const Vec& x) {
  const int d = body.ambient_dim();
  const auto extent_at = [&](double theta) {
    Vec u = Vec::Zero(d);
    u[0] = std::cos(theta);
    u[1] = std::sin(theta);
    return extent_by_membership(body, x, u);
  };
  double best_theta = 0.0, best = kInf;
  const int grid = 1024;
  for (int i = 0; i <= grid; ++i) {
    const double theta = M_PI * i / grid;
    const double e = extent_at(theta);
    if (e < best) {
      best = e;
      best_theta = theta;
    }
  }
  double a = best_theta - M_PI / grid, b = best_theta + M_PI / grid;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
  double f1 = extent_at(c1), f2 = extent_at(c2);
  for (int i = 0; i < 60; ++i) {
    if (f1 < f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - gr * (b - a);
      f1 = extent_at(c1);
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + gr * (b - a);
      f2 = extent_at(c2);
    }
  }
  return std::min(f1, f2);
}

}  // namespace

TEST_CASE("ball: radial projection and fixed interior points") {
  const Ball ball(Vec::Zero(3), 1.0);
  CHECK((ball.project(2.0 * Vec::Unit(3, 0)) - Vec(Vec::Unit(3, 0))).norm() < 1e-15);
  Vec inside(3);
  inside << 0.2, -0.1, 0.4;
  CHECK((ball.project(inside) - inside).norm() == 0.0);
  CHECK(ball.boundary_distance(Vec::Zero(3)) == doctest::Approx(1.0));
  CHECK(ball.ray_max(Vec::Zero(3), Vec::Unit(3, 0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(ball.boundary_distance(3.0 * Vec::Unit(3, 0)), DomainError);
}

TEST_CASE("tube: boundary distance and unbounded rays along the axis") {
  const int d = 6;
  const Tube tube(plane_subspace(d), 1.0);
  CHECK(tube.boundary_distance(Vec::Zero(d)) == doctest::Approx(1.0));
  const Vec on_axis = 5.0 * Vec::Unit(d, 0);
  CHECK(tube.boundary_distance(on_axis) == doctest::Approx(1.0));
  CHECK(tube.ray_max(Vec::Zero(d), Vec::Unit(d, 0)) == kInf);
  CHECK(tube.ray_max(Vec::Zero(d), Vec::Unit(d, 3)) == doctest::Approx(1.0).epsilon(1e-12));
  // projection clips only the perpendicular part
  Vec far = Vec::Zero(d);
  far[0] = 7.0;
  far[3] = 2.0;
  const Vec p = tube.project(far);
  CHECK(p[0] == doctest::Approx(7.0));
  CHECK(p[3] == doctest::Approx(1.0));
}

TEST_CASE("halfspace pair matches the active-set oracle") {
  std::vector<Halfspace> faces;
  faces.push_back({Vec(Vec::Unit(3, 0)), 1.0});
  Vec n2(3);
  n2 << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0;
  faces.push_back({n2, 0.5});
  const HalfspaceIntersection body(faces);
  Rng rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    const Vec x = 4.0 * gaussian_vec(rng, 3);
    const Vec p = body.project(x);
    const Vec q = two_halfspace_oracle(faces, x);
    CHECK((p - q).norm() <= 1e-7);
    CHECK(body.contains(p, 1e-9));
  }
}

TEST_CASE("paraboloid: on-axis boundary distance matches the sampling oracle") {
  const SolidParaboloid body(4);
  Vec x = Vec::Zero(4);
  x[0] = 1.0;
  const double impl = body.boundary_distance(x);
  const double oracle = paraboloid_boundary_oracle(body, x);
  CHECK(std::abs(impl - oracle) <= 1e-5);
  CHECK(impl == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-9));
}

TEST_CASE("paraboloid: projection lands on the boundary for exterior points") {
  const SolidParaboloid body(5);
  Rng rng(321);
  for (int trial = 0; trial < 200; ++trial) {
    Vec x = 3.0 * gaussian_vec(rng, 5);
    x[0] -= 2.0;
    const Vec p = body.project(x);
    CHECK(body.contains(p, 1e-9));
    if (!body.contains(x, 0.0)) {
      // projection onto the epigraph boundary: x1 == ||tail||^2
      CHECK(std::abs(p[0] - p.tail(4).squaredNorm()) <= 1e-9);
      // local optimality against nearby boundary points
      const double dist = (x - p).norm();
      for (int probe = 0; probe < 8; ++probe) {
        Vec q = p.tail(4) + 1e-4 * gaussian_vec(rng, 4);
        Vec cand(5);
        cand[0] = q.squaredNorm();
        cand.tail(4) = q;
        CHECK((x - cand).norm() >= dist - 1e-8);
      }
    }
  }
}

TEST_CASE("blunt cone: ray extent hits the rim at beta when alpha=beta=1") {
  const int d = 4;
  Mat b = Mat::Zero(d, 1);
  b(0, 0) = 1.0;
  const BluntCone cone(Subspace(b), 1.0, 1.0);
  // along a direction orthogonal to F the inequality forces extent 1
  CHECK(cone.ray_max(Vec::Zero(d), Vec::Unit(d, 1)) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(cone.contains(Vec::Zero(d), 0.0));
  Vec deep(4);
  deep << 2.0, 3.4, 0, 0;  // ||perp|| - 1 = 2.4 > 2: outside
  CHECK(!cone.contains(deep, 1e-9));
  deep[1] = 2.9;  // 1.9 <= 2 holds
  CHECK(cone.contains(deep, 1e-9));
}

TEST_CASE("nonexpansive projections on the convex catalog") {
  const int d = 5;
  std::vector<BodyPtr> bodies;
  bodies.push_back(std::make_shared<Ball>(Vec::Zero(d), 1.5));
  bodies.push_back(std::make_shared<Tube>(plane_subspace(d), 1.0));
  bodies.push_back(std::make_shared<SolidParaboloid>(d));
  std::vector<Halfspace> faces{{Vec(Vec::Unit(d, 0)), 1.0}, {Vec(Vec::Unit(d, 1)), 0.5}};
  bodies.push_back(std::make_shared<HalfspaceIntersection>(faces));
  Rng rng(55);
  for (const BodyPtr& body : bodies) {
    double worst = 0.0;
    for (int trial = 0; trial < 2500; ++trial) {
      const Vec x = 4.0 * gaussian_vec(rng, d);
      const Vec y = 4.0 * gaussian_vec(rng, d);
      const Vec px = body->project(x);
      const Vec py = body->project(y);
      worst = std::max(worst, (px - py).norm() - (x - y).norm());
      CHECK(body->contains(px, 1e-9));
    }
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("projection shrinks distances to body points") {
  // for x in the body: ||x - pi_C(y)|| <= ||x - y||
  const Tube tube(plane_subspace(6), 1.0);
  Rng rng(77);
  for (int trial = 0; trial < 2000; ++trial) {
    const Vec x = sample_in_body(tube, rng, 5.0);
    const Vec y = 6.0 * gaussian_vec(rng, 6);
    CHECK((x - tube.project(y)).norm() <= (x - y).norm() + 1e-9);
  }
}

TEST_CASE("interior balls of radius below the boundary distance stay inside") {
  const SolidParaboloid body(4);
  Rng rng(88);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec x = sample_in_body(body, rng, 3.0);
    const double bd = body.boundary_distance(x);
    if (bd <= 1e-6) continue;
    for (int probe = 0; probe < 40; ++probe) {
      const Vec u = unit_vec(rng, 4);
      CHECK(body.contains(x + 0.999 * bd * u, 1e-9));
    }
  }
}

TEST_CASE("unbounded directions respect the orthogonality constraint") {
  const int d = 6;
  const Tube tube(plane_subspace(d), 1.0);
  Mat q = Mat::Zero(d, 1);
  q(0, 0) = 1.0;  // F = span{e1}; the tube axis still offers e2
  const auto dir = tube.unbounded_direction(Subspace(q));
  REQUIRE(dir.has_value());
  CHECK(std::abs(dir->dot(Vec::Unit(d, 0))) <= 1e-9);
  CHECK(tube.ray_max(Vec::Zero(d), *dir) == kInf);

  const FullSpace full(4);
  CHECK(full.unbounded_direction(Subspace::zero(4)).has_value());

  const SolidParaboloid parab(4);
  CHECK(parab.unbounded_direction(Subspace::zero(4)).has_value());
  Mat axis = Mat::Zero(4, 1);
  axis(0, 0) = 1.0;
  CHECK(!parab.unbounded_direction(Subspace(axis)).has_value());
}

TEST_CASE("json catalog round-trips membership behavior") {
  const Json spec = Json::parse(R"({
    "kind": "translate",
    "shift": [0.5, 0, 0, 0],
    "base": {"kind": "ball", "center": [0, 0, 0, 0], "radius": 2.0}
  })");
  const BodyPtr body = body_from_json(spec);
  const BodyPtr body2 = body_from_json(body->to_json());
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec x = 4.0 * gaussian_vec(rng, 4);
    CHECK(body->contains(x, 1e-9) == body2->contains(x, 1e-9));
    CHECK((body->project(x) - body2->project(x)).norm() <= 1e-12);
  }
  CHECK_THROWS_AS(body_from_json(Json::parse(R"({"kind": "wedge"})")), ConfigError);
}

TEST_CASE("hull projection stays in the hull and beats every vertex") {
  std::vector<Vec> verts;
  Rng rng(9);
  for (int i = 0; i < 6; ++i) verts.push_back(gaussian_vec(rng, 4));
  const PolytopeHull hull(verts);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec x = 3.0 * gaussian_vec(rng, 4);
    const Vec p = hull.project(x);
    CHECK((hull.project(p) - p).norm() <= 1e-8);
    CHECK(hull.contains(p, 1e-8));
    for (const Vec& v : verts) CHECK((x - p).norm() <= (x - v).norm() + 1e-10);
  }
}

TEST_CASE("infeasible halfspace systems raise a convergence error") {
  std::vector<Halfspace> faces{{Vec(Vec::Unit(3, 0)), -1.0}, {Vec(-Vec::Unit(3, 0)), -1.0}};
  const HalfspaceIntersection empty_body(faces);
  CHECK_THROWS_AS(empty_body.project(Vec::Zero(3)), ConvergenceError);
}

TEST_CASE("ray_max rejects non-unit directions") {
  const Ball ball(Vec::Zero(3), 1.0);
  CHECK_THROWS_AS(ball.ray_max(Vec::Zero(3), Vec(2.0 * Vec::Unit(3, 0))), DomainError);
}
