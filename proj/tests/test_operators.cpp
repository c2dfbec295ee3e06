#include <doctest.h>

#include "averop/operator.hpp"
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
  // the line {x = y} as an intersection of opposite halfspaces
  return ConvexSet::halfspace_intersection(
      {HalfspaceData{vec2(1, -1), 0.0}, HalfspaceData{vec2(-1, 1), 0.0}});
}

ConvexSet slab_b() {
  return ConvexSet::halfspace_intersection(
      {HalfspaceData{vec2(1, 1), 0.0}, HalfspaceData{vec2(-1, 0), -2.0}});
}

std::vector<Operator> small_catalog() {
  std::vector<Operator> cat;
  cat.push_back(Operator::identity(2));
  cat.push_back(Operator::shift(vec2(1, -2)));
  cat.push_back(Operator::constant(vec2(0.5, 0.5)));
  Matrix A(2, 2);
  A << 1, 0, 0, -0.5;
  cat.push_back(Operator::linear(A));
  cat.push_back(Operator::projection(ConvexSet::ball(vec2(0, 0), 1.0)));
  cat.push_back(Operator::reflector(ConvexSet::halfspace(vec2(1, 1), 0.0)));
  Matrix Q(2, 2);
  Q << 2, 0, 0, 1;
  cat.push_back(Operator::prox(ConvexFunction::quadratic(Q)));
  cat.push_back(Operator::prox(ConvexFunction::huber(1.0, 1.0, 2)));
  Matrix S(2, 2);
  S << 0, -1, 1, 0;
  cat.push_back(Operator::resolvent(MonotoneOperator::linear(S), 1.0));
  cat.push_back(Operator::reflected_resolvent(
      MonotoneOperator::normal_cone(ConvexSet::box(vec2(-1, -1), vec2(1, 1)))));
  cat.push_back(Operator::relaxation(0.4, Operator::reflector(ConvexSet::ball(vec2(0, 0), 2.0))));
  cat.push_back(Operator::douglas_rachford(line_a(), slab_b()));
  return cat;
}

}  // namespace

TEST_CASE("identity evaluation") {
  Operator id = Operator::identity(2);
  CHECK(id(vec2(3, -1)) == vec2(3, -1));
}

TEST_CASE("projection evaluation through the operator surface") {
  Operator p = Operator::projection(ConvexSet::halfspace(vec2(1, 1), 0.0));
  CHECK(p(vec2(4, 10)) == vec2(4, 10));
  CHECK(p(vec2(-2, -4)) == vec2(1, -1));
}

TEST_CASE("Douglas-Rachford step reproduces the worked value") {
  Operator T = Operator::douglas_rachford(line_a(), slab_b());
  CHECK(T(vec2(4, 10)) == vec2(-1, 7));

  // same geometry with the line given through an orthonormal basis
  Matrix b(2, 1);
  b << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  Operator T2 = Operator::douglas_rachford(ConvexSet::linear_subspace(b), slab_b());
  CHECK((T2(vec2(4, 10)) - vec2(-1, 7)).norm() < 1e-12);
}

TEST_CASE("matrix certification threshold") {
  Matrix rot(2, 2);
  const double c = std::cos(0.3), s = std::sin(0.3);
  rot << c, -s, s, c;
  CHECK_NOTHROW(Operator::linear(rot));

  CHECK_THROWS_AS(Operator::linear(1.1 * Matrix::Identity(2, 2)), NotNonexpansive);
  Matrix barely(1, 1);
  barely << 1.0 + 5e-9;
  CHECK_THROWS_AS(Operator::linear(barely), NotNonexpansive);
  Matrix inside(1, 1);
  inside << 1.0 + 5e-10;
  CHECK_NOTHROW(Operator::linear(inside));
}

TEST_CASE("resolvent of a linear monotone map solves (I + aM) u = x") {
  Matrix S(2, 2);
  S << 0, -1, 1, 0;
  MonotoneOperator A = MonotoneOperator::linear(S);
  Vector x = vec2(3, 1);
  for (double a : {0.5, 1.0, 2.0}) {
    Vector u = A.resolvent(x, a);
    CHECK(((Matrix::Identity(2, 2) + a * S) * u - x).norm() < 1e-13);
  }
  CHECK(A.resolvent(x, 0.0) == x);
}

TEST_CASE("resolvent catalog routes") {
  ConvexSet ball = ConvexSet::ball(vec2(0, 0), 1.0);
  MonotoneOperator nc = MonotoneOperator::normal_cone(ball);
  CHECK(Operator::resolvent(nc, 2.0)(vec2(3, 0)) == vec2(1, 0));

  MonotoneOperator scaled = MonotoneOperator::scaled(2.0, nc);
  CHECK(Operator::resolvent(scaled, 1.0)(vec2(3, 0)) == vec2(1, 0));

  Matrix Q(2, 2);
  Q << 3, 0, 0, 3;
  MonotoneOperator df = MonotoneOperator::subdifferential(ConvexFunction::quadratic(Q));
  CHECK((Operator::resolvent(df, 1.0)(vec2(4, 8)) - vec2(1, 2)).norm() < 1e-13);
}

TEST_CASE("sampled nonexpansiveness across the catalog") {
  NormalSampler sampler(41);
  const double scales[] = {0.1, 1.0, 10.0};
  for (const auto& T : small_catalog()) {
    for (int i = 0; i < 300; ++i) {
      Vector x = sampler.vector(2, scales[i % 3]);
      Vector y = sampler.vector(2, scales[i % 3]);
      CHECK((T(x) - T(y)).norm() <= (x - y).norm() + 1e-10);
    }
  }
}

TEST_CASE("evaluation is deterministic") {
  Operator T = Operator::douglas_rachford(line_a(), slab_b());
  Vector x = vec2(0.123456, -9.87);
  Vector a = T(x), b = T(x);
  CHECK(a == b);
}

TEST_CASE("compose and convex combination validation") {
  Operator id2 = Operator::identity(2);
  Operator id3 = Operator::identity(3);
  CHECK_THROWS_AS(Operator::compose({id2, id3}), DimensionMismatch);
  CHECK_THROWS_AS(Operator::compose({}), ValidationError);
  CHECK_THROWS_AS(Operator::convex_combination({0.5, 0.6}, {id2, id2}), ValidationError);
  CHECK_THROWS_AS(Operator::convex_combination({-0.1, 1.1}, {id2, id2}), ValidationError);
  CHECK_NOTHROW(Operator::convex_combination({0.25, 0.75}, {id2, id2}));
  CHECK_THROWS_AS(Operator::relaxation(1.5, id2), ValidationError);
}

TEST_CASE("compose applies right to left") {
  Matrix A(2, 2);
  A << 0.5, 0, 0, 0.5;
  Operator scale = Operator::linear(A);
  Operator shift = Operator::shift(vec2(1, 0));
  // Compose({scale, shift}) x = scale(shift(x))
  CHECK(Operator::compose({scale, shift})(vec2(1, 1)) == vec2(1, 0.5));
  CHECK(Operator::compose({shift, scale})(vec2(1, 1)) == vec2(1.5, 0.5));
}

TEST_CASE("scalar piecewise validation and evaluation") {
  using ops::AffinePiece;
  CHECK_THROWS_AS(Operator::scalar_piecewise({0.0}, {AffinePiece{0.0, 0.0}}), ValidationError);
  CHECK_THROWS_AS(
      Operator::scalar_piecewise({0.0}, {AffinePiece{0.0, 0.0}, AffinePiece{1.0, 0.5}}),
      ValidationError);  // discontinuous at 0
  CHECK_THROWS_AS(
      Operator::scalar_piecewise({0.0}, {AffinePiece{1.2, 0.0}, AffinePiece{1.2, 0.0}}),
      NotNonexpansive);

  Operator f = Operator::scalar_piecewise(
      {0.0, 1.0}, {AffinePiece{0.0, 0.0}, AffinePiece{1.0, 0.0}, AffinePiece{-0.5, 1.5}});
  CHECK(f(vec1(-3.0))(0) == 0.0);
  CHECK(f(vec1(0.5))(0) == 0.5);
  CHECK(f(vec1(3.0))(0) == 0.0);
  CHECK(f(vec1(5.0))(0) == -1.0);
}

TEST_CASE("limit operator settles on fixed points and reports divergence") {
  Operator p = Operator::projection(ConvexSet::ball(vec2(0, 0), 1.0));
  Operator lim = Operator::limit(p, 1e-10, 100);
  CHECK(lim(vec2(2, 0)) == vec2(1, 0));

  Matrix rot(2, 2);
  const double c = std::cos(M_PI / 4), s = std::sin(M_PI / 4);
  rot << c, -s, s, c;
  Operator spin = Operator::limit(Operator::linear(rot), 1e-10, 50);
  CHECK_THROWS_AS(spin(vec2(1, 0)), NonConvergence);
}

TEST_CASE("affine collapse matches pointwise evaluation") {
  Matrix bu(2, 1), bv(2, 1);
  bu << 1.0, 0.0;
  const double th = M_PI / 3;
  bv << std::cos(th), std::sin(th);
  Operator T = Operator::douglas_rachford(ConvexSet::linear_subspace(bu),
                                          ConvexSet::linear_subspace(bv));
  auto aff = try_affine(T);
  REQUIRE(aff.has_value());
  NormalSampler sampler(2);
  for (int i = 0; i < 50; ++i) {
    Vector x = sampler.vector(2, 3.0);
    CHECK((aff->M * x + aff->b - T(x)).norm() < 1e-13);
  }

  // prox of a quadratic collapses to (I + Q)^{-1}
  Matrix Q(2, 2);
  Q << 3, 1, 1, 2;
  Operator P = Operator::prox(ConvexFunction::quadratic(Q));
  auto paff = try_affine(P);
  REQUIRE(paff.has_value());
  for (int i = 0; i < 20; ++i) {
    Vector x = sampler.vector(2, 5.0);
    CHECK((paff->M * x + paff->b - P(x)).norm() < 1e-12);
  }
}

TEST_CASE("structural constant detection") {
  CHECK(is_constant_map(Operator::constant(vec2(1, 2))));
  CHECK(is_constant_map(Operator::projection(ConvexSet::singleton(vec2(1, 2)))));
  CHECK(is_constant_map(
      Operator::compose({Operator::identity(2), Operator::constant(vec2(0, 0))})));
  CHECK(!is_constant_map(Operator::identity(2)));
  CHECK(!is_constant_map(Operator::reflector(ConvexSet::singleton(vec2(1, 2)))));
}

TEST_CASE("dimension mismatch at evaluation") {
  Operator id = Operator::identity(2);
  CHECK_THROWS_AS(id(vec1(1.0)), DimensionMismatch);
}
