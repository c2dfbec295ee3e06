#include "averop/dynamics.hpp"

#include <algorithm>

#include "averop/sampling.hpp"

namespace averop {

namespace {
constexpr double kScales[] = {0.1, 1.0, 10.0};
constexpr double kLimitTol = 1e-10;
constexpr long kLimitMaxIter = 1000000;
constexpr double kFixSetTol = 1e-8;
}  // namespace

const char* to_string(LimitVerdict v) {
  return v == LimitVerdict::projection ? "projection" : "not_projection";
}

Orbit orbit(const Operator& T, const Vector& x0, double tol, long max_iter) {
  require_dim(x0, T.dim(), "orbit");
  if (!(tol >= 0.0) || max_iter < 0) throw ValidationError("orbit needs tol >= 0, max_iter >= 0");
  Orbit o;
  o.points.push_back(x0);
  long i = 0;
  while (true) {
    Vector next = T(o.points.back());
    const double r = (next - o.points.back()).norm();
    if (r <= tol) {
      o.converged = true;
      o.residual = r;
      o.iterations = i;
      return o;
    }
    if (i >= max_iter) {
      o.converged = false;
      o.residual = r;
      o.iterations = i;
      return o;
    }
    o.points.push_back(std::move(next));
    ++i;
  }
}

Vector limiting_apply(const Operator& T, const Vector& x, double tol, long max_iter) {
  Orbit o = orbit(T, x, tol, max_iter);
  if (!o.converged) {
    throw NonConvergence("limiting_apply: orbit residual " + std::to_string(o.residual) +
                         " after " + std::to_string(o.iterations) + " iterations");
  }
  return o.points.back();
}

LimitingReport limiting_properties_check(const Operator& T, long n, unsigned long long seed,
                                         double tol) {
  if (n < 1 || !(tol > 0.0)) throw ValidationError("limiting_properties_check needs n >= 1, tol > 0");
  NormalSampler sampler(seed);
  LimitingReport rep;
  for (long i = 0; i < n; ++i) {
    Vector x = sampler.vector(T.dim(), kScales[i % 3]);
    Vector z = limiting_apply(T, x, kLimitTol, kLimitMaxIter);
    const double range_res = (T(z) - z).norm();
    Vector zz = limiting_apply(T, z, kLimitTol, kLimitMaxIter);
    const double idem_res = (zz - z).norm();
    if ((range_res > tol || idem_res > tol) && !rep.witness) rep.witness = x;
    rep.max_range_residual = std::max(rep.max_range_residual, range_res);
    rep.max_idempotence_residual = std::max(rep.max_idempotence_residual, idem_res);
    ++rep.points_checked;
  }
  rep.pass = rep.max_range_residual <= tol && rep.max_idempotence_residual <= tol;
  return rep;
}

ClassifyReport classify_limit(const Operator& T, const ConvexSet& fix_set, long n,
                              unsigned long long seed, double tol,
                              const std::vector<Vector>& probes) {
  if (fix_set.dim() != T.dim()) throw DimensionMismatch("classify_limit: fix_set dimension");
  if (n < 1 || !(tol > 0.0)) throw ValidationError("classify_limit needs n >= 1, tol > 0");

  std::vector<Vector> points;
  points.reserve(probes.size() + static_cast<size_t>(n));
  for (const auto& p : probes) {
    require_dim(p, T.dim(), "classify_limit probe");
    points.push_back(p);
  }
  NormalSampler sampler(seed);
  for (long i = 0; i < n; ++i) points.push_back(sampler.vector(T.dim(), kScales[i % 3]));

  // validate the supplied fixed-set description in both directions
  for (const auto& x : points) {
    Vector z = limiting_apply(T, x, kLimitTol, kLimitMaxIter);
    if (!fix_set.contains(z, kFixSetTol)) {
      throw FixSetMismatch("classify_limit: a sampled limit point is not in fix_set");
    }
    Vector p = fix_set.project(x);
    if ((T(p) - p).norm() > kFixSetTol) {
      throw FixSetMismatch("classify_limit: a sampled fix_set point is not fixed by T");
    }
  }

  ClassifyReport rep;
  rep.points_checked = static_cast<long>(points.size());
  for (const auto& x : points) {
    Vector z = limiting_apply(T, x, kLimitTol, kLimitMaxIter);
    Vector p = fix_set.project(x);
    if ((z - p).norm() > 10.0 * tol && !rep.witness) {
      rep.verdict = LimitVerdict::not_projection;
      rep.witness = ClassifyWitness{x, z, p, (x - z).norm(), (x - p).norm()};
    }
  }
  rep.limit_modulus_estimate =
      estimate_modulus(Operator::limit(T, kLimitTol, kLimitMaxIter), std::min<long>(n, 2000), seed, 0);
  return rep;
}

}  // namespace averop
