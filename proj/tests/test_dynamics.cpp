#include <doctest.h>

#include "averop/dynamics.hpp"
#include "averop/modulus.hpp"
#include "averop/sampling.hpp"

using namespace averop;

namespace {

Vector vec1(double a) {
  Vector v(1);
  v << a;
  return v;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

ConvexSet line_a() {
  return ConvexSet::halfspace_intersection(
      {HalfspaceData{vec2(1, -1), 0.0}, HalfspaceData{vec2(-1, 1), 0.0}});
}

ConvexSet slab_b() {
  return ConvexSet::halfspace_intersection(
      {HalfspaceData{vec2(1, 1), 0.0}, HalfspaceData{vec2(-1, 0), -2.0}});
}

ConvexSet fix_segment() {
  return ConvexSet::halfspace_intersection(
      {HalfspaceData{vec2(1, -1), 0.0}, HalfspaceData{vec2(-1, 1), 0.0},
       HalfspaceData{vec2(1, 1), 0.0}, HalfspaceData{vec2(-1, -1), -4.0}});
}

Operator dr_example() { return Operator::douglas_rachford(line_a(), slab_b()); }

}  // namespace

TEST_CASE("the Douglas-Rachford orbit hits its worked iterates exactly") {
  Orbit o = orbit(dr_example(), vec2(4, 10), 1e-10, 1000000);
  REQUIRE(o.points.size() == 5);
  CHECK(o.points[0] == vec2(4, 10));
  CHECK(o.points[1] == vec2(-1, 7));
  CHECK(o.points[2] == vec2(-2, 3));
  CHECK(o.points[3] == vec2(-0.5, 0.5));
  CHECK(o.points[4] == vec2(0, 0));
  CHECK(o.converged);
  CHECK(o.iterations == 4);
  CHECK(o.residual == 0.0);
}

TEST_CASE("identity orbits converge immediately") {
  Orbit o = orbit(Operator::identity(2), vec2(5, -3), 1e-10, 100);
  CHECK(o.converged);
  CHECK(o.iterations == 0);
  CHECK(o.points.size() == 1);
}

TEST_CASE("projection orbits converge in one step") {
  Orbit o = orbit(Operator::projection(ConvexSet::ball(vec2(0, 0), 1.0)), vec2(2, 0), 1e-10, 100);
  CHECK(o.converged);
  CHECK(o.iterations == 1);
  CHECK(o.points.back() == vec2(1, 0));
}

TEST_CASE("orbit cap is reported, not fatal") {
  Matrix rot(2, 2);
  const double c = std::cos(M_PI / 4), s = std::sin(M_PI / 4);
  rot << c, -s, s, c;
  Orbit o = orbit(Operator::linear(rot), vec2(1, 0), 1e-10, 25);
  CHECK(!o.converged);
  CHECK(o.iterations == 25);
  CHECK(o.residual > 0.1);
}

TEST_CASE("limiting operator values") {
  CHECK(limiting_apply(dr_example(), vec2(4, 10)) == vec2(0, 0));

  // firmly nonexpansive scalar blend toward [0, 1] clamps in the limit
  Operator g = Operator::relaxation(
      0.5, Operator::projection(ConvexSet::box(vec1(0.0), vec1(1.0))));
  CHECK(std::abs(limiting_apply(g, vec1(5.0), 1e-10, 1000000)(0) - 1.0) < 1e-8);
  CHECK(std::abs(limiting_apply(g, vec1(-2.0))(0) - 0.0) < 1e-8);

  Vector fixed = vec2(1, 1);
  CHECK(limiting_apply(dr_example(), fixed) == fixed);
}

TEST_CASE("limiting operator properties hold at sampled points") {
  LimitingReport rep = limiting_properties_check(dr_example(), 100, 0, 1e-6);
  CHECK(rep.pass);
  CHECK(rep.max_range_residual <= 1e-6);
  CHECK(rep.max_idempotence_residual <= 1e-6);

  LimitingReport proj =
      limiting_properties_check(Operator::projection(ConvexSet::ball(vec2(0, 0), 1.0)), 50, 1, 1e-8);
  CHECK(proj.pass);

  LimitingReport relax = limiting_properties_check(
      Operator::relaxation(0.9, Operator::reflector(ConvexSet::ball(vec2(0, 0), 1.0))), 50, 2, 1e-6);
  CHECK(relax.pass);
}

TEST_CASE("classification of the Douglas-Rachford counterexample") {
  std::vector<Vector> probes = {vec2(4, 10)};
  ClassifyReport rep = classify_limit(dr_example(), fix_segment(), 200, 0, 1e-6, probes);
  CHECK(rep.verdict == LimitVerdict::not_projection);
  REQUIRE(rep.witness.has_value());
  CHECK(rep.witness->x == vec2(4, 10));
  CHECK(rep.witness->limit == vec2(0, 0));
  CHECK(rep.witness->nearest_fixed == vec2(2, 2));
  CHECK(std::abs(rep.witness->dist_limit - 2.0 * std::sqrt(29.0)) <= 1e-12);
  CHECK(std::abs(rep.witness->dist_nearest - 2.0 * std::sqrt(17.0)) <= 1e-12);
  CHECK(rep.witness->dist_nearest < rep.witness->dist_limit);
  // the sampled modulus of the limiting operator corroborates the verdict
  CHECK(rep.limit_modulus_estimate.value > 0.5);
}

TEST_CASE("classification verdicts are stable across seeds") {
  for (unsigned long long seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
    ClassifyReport rep = classify_limit(dr_example(), fix_segment(), 100, seed, 1e-6);
    CHECK(rep.verdict == LimitVerdict::not_projection);
  }
}

TEST_CASE("averaged linear maps settle on the projection onto their fixed subspace") {
  Matrix M(2, 2);
  M << 1, 0, 0, 0.5;
  Operator T = Operator::linear(M);
  Matrix b(2, 1);
  b << 1, 0;
  ConvexSet fix = ConvexSet::linear_subspace(b);
  for (unsigned long long seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
    ClassifyReport rep = classify_limit(T, fix, 100, seed, 1e-6);
    CHECK(rep.verdict == LimitVerdict::projection);
  }
}

TEST_CASE("firmly nonexpansive scalar maps settle on the clamp") {
  Operator g = Operator::relaxation(
      0.5, Operator::projection(ConvexSet::box(vec1(0.0), vec1(1.0))));
  ClassifyReport rep = classify_limit(g, ConvexSet::box(vec1(0.0), vec1(1.0)), 100, 0, 1e-5);
  CHECK(rep.verdict == LimitVerdict::projection);
}

TEST_CASE("wrong fixed sets are rejected") {
  ConvexSet wrong = ConvexSet::ball(vec2(5, 5), 0.5);
  CHECK_THROWS_AS(classify_limit(dr_example(), wrong, 50, 0, 1e-6), FixSetMismatch);
}

TEST_CASE("orbits are Fejer monotone with respect to the fixed set") {
  ConvexSet fix = fix_segment();
  NormalSampler sampler(21);
  const double scales[] = {0.1, 1.0, 10.0};
  for (int trial = 0; trial < 25; ++trial) {
    Vector x0 = sampler.vector(2, scales[trial % 3]);
    Orbit o = orbit(dr_example(), x0, 1e-10, 1000000);
    for (size_t i = 0; i + 1 < o.points.size(); ++i) {
      const double before = fix.distance(o.points[i]);
      const double after = fix.distance(o.points[i + 1]);
      CHECK(after <= before + 1e-10);
    }
  }
}
