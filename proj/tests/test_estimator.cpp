#include <doctest.h>

#include "averop/estimate.hpp"
#include "averop/modulus.hpp"
#include "oracles.hpp"

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

Matrix diag2(double a, double b) {
  Matrix D(2, 2);
  D << a, 0, 0, b;
  return D;
}

double modulus_ratio_at(const Operator& T, const Vector& x, const Vector& y) {
  Vector dx = x - y;
  Vector db = dx - (T(x) - T(y));
  return db.squaredNorm() / (2.0 * dx.dot(db));
}

}  // namespace

TEST_CASE("modulus estimate on the diagonal example") {
  Operator T = Operator::linear(diag2(1.0, -0.5));
  ValueEstimate plain = estimate_modulus(T, 10000, 0, 0);
  CHECK(plain.value >= 0.74);
  CHECK(plain.value <= 0.75 + 1e-9);
  ValueEstimate refined = estimate_modulus(T, 10000, 0, 100);
  CHECK(std::abs(refined.value - 0.75) <= 1e-6);
  CHECK(refined.direction == Direction::lower_bound);
}

TEST_CASE("estimate witness reproduces the reported ratio") {
  Operator T = Operator::linear(diag2(1.0, -0.5));
  ValueEstimate e = estimate_modulus(T, 2000, 3, 0);
  CHECK(std::abs(modulus_ratio_at(T, e.witness_x, e.witness_y) - e.value) <= 1e-12);
}

TEST_CASE("estimates are reproducible and shift invariant") {
  Operator T = Operator::prox(ConvexFunction::huber(1.0, 1.0, 2));
  ValueEstimate a = estimate_modulus(T, 4000, 9, 0);
  ValueEstimate b = estimate_modulus(T, 4000, 9, 0);
  CHECK(a.value == b.value);
  CHECK(a.witness_x == b.witness_x);

  // translation changes only the rounding path, never the sampled ratios
  Operator shifted = Operator::compose({Operator::shift(vec2(2, -3)), T});
  ValueEstimate c = estimate_modulus(shifted, 4000, 9, 0);
  CHECK(std::abs(a.value - c.value) <= 1e-12);
}

TEST_CASE("shift operators estimate to zero") {
  ValueEstimate e = estimate_modulus(Operator::shift(vec2(1, 2)), 1000, 0, 0);
  CHECK(e.value == 0.0);
}

TEST_CASE("projection estimate reaches one half on its boundary pair") {
  Operator T = Operator::projection(ConvexSet::halfspace(vec2(1, 1), 0.0));
  ValueEstimate e = estimate_modulus(T, 5000, 1, 0);
  CHECK(e.value <= 0.5 + 1e-9);
  CHECK(e.value >= 0.5 - 1e-12);
}

TEST_CASE("cocoercive value of the displacement of a projection") {
  // Id - P_C arises as the unit Yosida regularization of the normal cone
  MonotoneOperator disp = MonotoneOperator::yosida(
      1.0, MonotoneOperator::normal_cone(ConvexSet::halfspace(vec2(1, 1), 0.0)));
  ValueEstimate e = estimate_value(Quantity::cocoercive_value, disp, 5000, 2);
  CHECK(e.direction == Direction::upper_bound);
  CHECK(std::abs(e.value - 1.0) <= 1e-9);
}

TEST_CASE("monotone value of a skew matrix vanishes") {
  Matrix skew(2, 2);
  skew << 0, -1, 1, 0;
  ValueEstimate e = estimate_value(Quantity::monotone_value, MonotoneOperator::linear(skew), 5000, 4);
  CHECK(e.value <= 1e-12);
  CHECK(e.value >= 0.0);
}

TEST_CASE("lipschitz value of a scaled identity") {
  Operator T = Operator::linear(0.7 * Matrix::Identity(2, 2));
  ValueEstimate e = estimate_value(Quantity::lipschitz_value, T, 2000, 5);
  CHECK(e.direction == Direction::lower_bound);
  CHECK(std::abs(e.value - 0.7) <= 1e-12);
}

TEST_CASE("consistency of the modulus and cocoercive estimates on shared pairs") {
  Operator T = Operator::linear(diag2(0.6, -0.2));
  std::vector<SamplePair> pairs = sample_pairs(2, 3000, 11);
  ValueEstimate km = estimate_modulus_on(T, pairs, 11, 0);
  ValueEstimate cc = estimate_value_on(
      Quantity::cocoercive_value, [&](const Vector& x) { return (x - T(x)).eval(); }, pairs, 11);
  CHECK(std::abs(1.0 / (2.0 * cc.value) - km.value) <= 1e-12);
}

TEST_CASE("duality of monotone and inverse-cocoercive estimates on matched samples") {
  Matrix M(2, 2);
  M << 2, -1, 1, 3;
  Matrix Minv = M.inverse();
  std::vector<SamplePair> pairs = sample_pairs(2, 3000, 13);
  ValueEstimate m_est = estimate_value_on(
      Quantity::monotone_value, [&](const Vector& x) { return (M * x).eval(); }, pairs, 13);
  std::vector<SamplePair> mapped;
  mapped.reserve(pairs.size());
  for (const auto& p : pairs) mapped.push_back({M * p.x, M * p.y});
  ValueEstimate c_est = estimate_value_on(
      Quantity::cocoercive_value, [&](const Vector& x) { return (Minv * x).eval(); }, mapped, 13);
  CHECK(std::abs(m_est.value - c_est.value) <= 1e-9);
}

TEST_CASE("value estimate witnesses reproduce their ratios") {
  Matrix M(2, 2);
  M << 2, -1, 1, 3;
  MonotoneOperator A = MonotoneOperator::linear(M);
  ValueEstimate m_est = estimate_value(Quantity::monotone_value, A, 2000, 3);
  Vector dx = m_est.witness_x - m_est.witness_y;
  Vector da = M * m_est.witness_x - M * m_est.witness_y;
  CHECK(std::abs(dx.dot(da) / dx.squaredNorm() - m_est.value) <= 1e-12);

  ValueEstimate c_est = estimate_value(Quantity::cocoercive_value, A, 2000, 3);
  Vector dx2 = c_est.witness_x - c_est.witness_y;
  Vector da2 = M * c_est.witness_x - M * c_est.witness_y;
  CHECK(std::abs(dx2.dot(da2) / da2.squaredNorm() - c_est.value) <= 1e-12);
}

TEST_CASE("falsifier finds and respects averagedness claims") {
  Operator bad = Operator::linear(diag2(1.0, -0.5));
  auto witness = falsify_averaged(bad, 0.5, 2000, 7);
  REQUIRE(witness.has_value());
  // the witness genuinely violates the characterization at one half
  Vector dx = witness->x - witness->y;
  Vector dt = bad(witness->x) - bad(witness->y);
  CHECK(dt.squaredNorm() > dx.dot(dt) + 1e-10);

  Operator proj = Operator::projection(ConvexSet::ball(vec2(0, 0), 1.0));
  CHECK(!falsify_averaged(proj, 0.5, 2000, 7).has_value());
  CHECK(!falsify_averaged(Operator::identity(2), 0.0, 1000, 7).has_value());
}

TEST_CASE("estimates never exceed exact values on a spot catalog") {
  std::vector<std::pair<Operator, double>> cat;
  cat.emplace_back(Operator::linear(diag2(1.0, -0.5)), 0.75);
  cat.emplace_back(Operator::projection(ConvexSet::ball(vec2(0, 0), 1.0)), 0.5);
  cat.emplace_back(Operator::prox(ConvexFunction::huber(1.0, 2.0, 2)), 1.0 / 3.0);
  cat.emplace_back(oracles::paper_scalar_map(), 0.75);
  for (const auto& [T, exact] : cat) {
    for (unsigned long long seed : {0ULL, 1ULL, 2ULL}) {
      ValueEstimate e = estimate_modulus(T, 4000, seed, 0);
      CHECK(e.value <= exact + 1e-9);
    }
  }
}

TEST_CASE("inversion by contraction") {
  // T = Id/2 written as a relaxation toward the zero map, k = 1/4
  Operator half = Operator::relaxation(0.5, Operator::constant(vec1(0.0)));
  CHECK(exact_modulus(half).upper == 0.25);
  InversionResult r = invert_by_contraction(half, vec1(3.0), 1e-12, 1000);
  CHECK(std::abs(r.x(0) - 6.0) <= 1e-11);
  CHECK(r.residual <= 1e-12);

  Matrix Q(1, 1);
  Q << 3.0;
  Operator proxq = Operator::prox(ConvexFunction::quadratic(Q));
  InversionResult r2 = invert_by_contraction(proxq, vec1(1.0), 1e-10, 1000);
  CHECK(std::abs(r2.x(0) - 4.0) <= 1e-8);
  CHECK(r2.iterations <= 120);

  // points of C are fixed by the averaged projection blend
  ConvexSet ball = ConvexSet::ball(vec2(0, 0), 1.0);
  Operator blend = Operator::prox(ConvexFunction::half_distance_squared(ball, 1.0));
  Vector v = vec2(0.3, 0.4);
  InversionResult r3 = invert_by_contraction(blend, v, 1e-12, 100);
  CHECK((r3.x - v).norm() <= 1e-11);
  CHECK(r3.iterations == 0);

  CHECK_THROWS_AS(invert_by_contraction(Operator::linear(diag2(1.0, -0.5)), vec2(1, 1), 1e-10, 100),
                  NotNormallyNonexpansive);
}

TEST_CASE("bilipschitz check") {
  Matrix Q(1, 1);
  Q << 3.0;
  Operator proxq = Operator::prox(ConvexFunction::quadratic(Q));
  BiLipschitzReport rep = bilipschitz_check(proxq, 0.375, 2000, 0);
  CHECK(rep.lower_factor == 0.25);
  CHECK(rep.min_ratio == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(rep.max_ratio <= 1.0 + 1e-12);

  Operator half = Operator::relaxation(0.5, Operator::constant(vec1(0.0)));
  BiLipschitzReport rep2 = bilipschitz_check(half, 0.25, 1000, 0);
  CHECK(rep2.min_ratio == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rep2.max_ratio == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(bilipschitz_check(Operator::linear(diag2(1.0, -0.5)), 0.75, 100, 0),
                  NotNormallyNonexpansive);

  // a wrong claim k = 0.05 for Id/2 breaks the lower inequality
  CHECK_THROWS_AS(bilipschitz_check(half, 0.05, 1000, 0), ViolationFound);
}

TEST_CASE("estimate value input validation") {
  Operator id = Operator::identity(2);
  // the identity has zero displacement: every cocoercive pair degenerates
  CHECK_THROWS_AS(
      estimate_value(Quantity::cocoercive_value, [](const Vector& x) { return (0.0 * x).eval(); },
                     2, 100, 0),
      AllPairsDegenerate);
  CHECK_THROWS_AS(estimate_value(Quantity::modulus, id, 100, 0), ValidationError);
  ConvexSet ball = ConvexSet::ball(vec2(0, 0), 1.0);
  CHECK_THROWS_AS(
      estimate_value(Quantity::monotone_value, MonotoneOperator::normal_cone(ball), 100, 0),
      UnsupportedFunction);
  CHECK_THROWS_AS(falsify_averaged(id, 1.5, 100, 0), ValidationError);
}
