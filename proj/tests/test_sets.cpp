#include <doctest.h>

#include "averop/convex_set.hpp"
#include "averop/identities.hpp"
#include "averop/sampling.hpp"

using namespace averop;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

ConvexSet slab_example() {
  // {(x, y) : -y <= x <= 2}
  return ConvexSet::halfspace_intersection(
      {HalfspaceData{vec2(1, 1), 0.0}, HalfspaceData{vec2(-1, 0), -2.0}});
}

}  // namespace

TEST_CASE("halfspace projection closed form") {
  ConvexSet h = ConvexSet::halfspace(vec2(1, 1), 0.0);  // x + y >= 0
  CHECK(h.project(vec2(4, 10)) == vec2(4, 10));
  CHECK(h.project(vec2(-2, -4)) == vec2(1, -1));
}

TEST_CASE("halfspace projection beats a brute-force boundary grid") {
  ConvexSet h = ConvexSet::halfspace(vec2(1, 1), 0.0);
  Vector x = vec2(-2, -4);
  Vector p = h.project(x);
  CHECK(h.contains(p, 1e-12));
  // candidates on the boundary line t (1, -1), plus x itself if feasible
  const double best = (x - p).norm();
  for (int i = -4000; i <= 4000; ++i) {
    const double t = i * 0.001;
    Vector u = vec2(t, -t);
    CHECK(best <= (x - u).norm() + 1e-12);
  }
}

TEST_CASE("projection idempotence across the catalog") {
  std::vector<ConvexSet> sets;
  sets.push_back(ConvexSet::box(vec2(-1, 0), vec2(2, 3)));
  sets.push_back(ConvexSet::ball(vec2(1, -1), 2.0));
  sets.push_back(ConvexSet::halfspace(vec2(3, -1), 0.5));
  {
    Matrix b(2, 1);
    b << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    sets.push_back(ConvexSet::linear_subspace(b));
    sets.push_back(ConvexSet::affine_subspace(b, vec2(1, 0)));
  }
  sets.push_back(ConvexSet::singleton(vec2(0.5, -0.25)));
  sets.push_back(slab_example());

  NormalSampler sampler(17);
  const double scales[] = {0.1, 1.0, 10.0};
  for (const auto& C : sets) {
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      Vector x = sampler.vector(2, scales[i % 3]);
      Vector p = C.project(x);
      worst = std::max(worst, (C.project(p) - p).norm());
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("Dykstra slab projector agrees with the closed form") {
  ConvexSet slab = slab_example();
  NormalSampler sampler(5);
  const double scales[] = {0.1, 1.0, 10.0};
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    Vector z = sampler.vector(2, scales[i % 3]);
    worst = std::max(worst, (slab.project(z) - slab_reference_projection(z)).norm());
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("slab corner and face regions") {
  ConvexSet slab = slab_example();
  CHECK(slab.project(vec2(10, 4)) == vec2(2, 4));
  CHECK(slab.project(vec2(3, -2)) == vec2(2, -2));
  // corner regions with non-dyadic input converge iteratively
  CHECK((slab.project(vec2(2.5, -2.2)) - vec2(2, -2)).norm() < 1e-9);
  CHECK(slab.project(vec2(0.5, -0.5)) == vec2(0.5, -0.5));
  CHECK((slab.project(vec2(1, -3)) - vec2(2, -2)).norm() < 1e-9);
}

TEST_CASE("segment as a halfspace intersection") {
  // {s (1,1) : s in [0, 2]} = {x = y} intersect {0 <= x + y <= 4}
  ConvexSet seg = ConvexSet::halfspace_intersection(
      {HalfspaceData{vec2(1, -1), 0.0}, HalfspaceData{vec2(-1, 1), 0.0},
       HalfspaceData{vec2(1, 1), 0.0}, HalfspaceData{vec2(-1, -1), -4.0}});
  CHECK(seg.project(vec2(4, 10)) == vec2(2, 2));
  CHECK(seg.project(vec2(-3, -1)) == vec2(0, 0));
  CHECK(seg.project(vec2(1, 1)) == vec2(1, 1));
  CHECK((seg.project(vec2(4, 10)) - vec2(4, 10)).norm() ==
        doctest::Approx(2.0 * std::sqrt(17.0)).epsilon(1e-14));
}

TEST_CASE("ball box singleton basics") {
  ConvexSet ball = ConvexSet::ball(vec2(0, 0), 1.0);
  CHECK(ball.project(vec2(2, 0)) == vec2(1, 0));
  CHECK(ball.project(vec2(0.5, 0)) == vec2(0.5, 0));

  ConvexSet box = ConvexSet::box(vec2(0, 0), vec2(1, 1));
  CHECK(box.project(vec2(2, -3)) == vec2(1, 0));

  ConvexSet sing = ConvexSet::singleton(vec2(3, 4));
  CHECK(sing.project(vec2(0, 0)) == vec2(3, 4));
  CHECK(sing.is_singleton());
  CHECK(!ball.is_singleton());
  CHECK(ConvexSet::ball(vec2(0, 0), 0.0).is_singleton());
}

TEST_CASE("subspace projection") {
  Matrix b(2, 1);
  b << 1.0, 0.0;
  ConvexSet U = ConvexSet::linear_subspace(b);
  CHECK(U.project(vec2(3, -7)) == vec2(3, 0));
  CHECK(U.contains(vec2(5, 0), 1e-12));
  CHECK(!U.contains(vec2(5, 1), 1e-12));

  Matrix empty(2, 0);
  ConvexSet zero = ConvexSet::linear_subspace(empty);
  CHECK(zero.project(vec2(3, -7)) == vec2(0, 0));
  CHECK(zero.is_singleton());
}

TEST_CASE("construction rejects invalid sets") {
  CHECK_THROWS_AS(ConvexSet::box(vec2(1, 0), vec2(0, 1)), ValidationError);
  CHECK_THROWS_AS(ConvexSet::ball(vec2(0, 0), -1.0), ValidationError);
  CHECK_THROWS_AS(ConvexSet::halfspace(vec2(0, 0), 1.0), ValidationError);
  // a square orthonormal basis would encode the whole space
  CHECK_THROWS_AS(ConvexSet::linear_subspace(Matrix::Identity(2, 2)), ValidationError);
  Matrix skewed(2, 1);
  skewed << 1.0, 1.0;  // not normalized
  CHECK_THROWS_AS(ConvexSet::linear_subspace(skewed), ValidationError);
  Vector bad = vec2(1, 1);
  bad(0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ConvexSet::singleton(bad), ValidationError);
  CHECK_THROWS_AS(ConvexSet::halfspace_intersection({}), ValidationError);
}

TEST_CASE("Dykstra reports non-convergence on an empty intersection") {
  Vector n(1);
  n << 1.0;
  Vector m(1);
  m << -1.0;
  // {x >= 1} and {x <= -1} are disjoint
  ConvexSet empty = ConvexSet::halfspace_intersection(
      {HalfspaceData{n, 1.0}, HalfspaceData{m, 1.0}}, 1e-10, 200);
  Vector x(1);
  x << 0.0;
  CHECK_THROWS_AS(empty.project(x), NonConvergence);
}

TEST_CASE("projection dimension mismatch") {
  ConvexSet ball = ConvexSet::ball(vec2(0, 0), 1.0);
  Vector w(3);
  w << 1, 2, 3;
  CHECK_THROWS_AS(ball.project(w), DimensionMismatch);
}
