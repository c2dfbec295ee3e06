#pragma once

#include <optional>
#include <vector>

#include "averop/convex_set.hpp"
#include "averop/estimate.hpp"
#include "averop/operator.hpp"

namespace averop {

struct Orbit {
  std::vector<Vector> points;  // points[i+1] = T(points[i]) exactly
  bool converged = false;
  double residual = 0.0;  // ||T x - x|| at the final point
  long iterations = 0;
};

// Iterates T from x0 until ||Tx - x|| <= tol or max_iter applications.
// Hitting the cap is reported through converged = false, not an error.
Orbit orbit(const Operator& T, const Vector& x0, double tol, long max_iter);

// Terminal point of the orbit; throws NonConvergence at the iteration cap.
Vector limiting_apply(const Operator& T, const Vector& x, double tol = 1e-10,
                      long max_iter = 1000000);

struct LimitingReport {
  long points_checked = 0;
  double max_range_residual = 0.0;       // || T(Tinf x) - Tinf x ||
  double max_idempotence_residual = 0.0; // || Tinf(Tinf x) - Tinf x ||
  bool pass = false;
  std::optional<Vector> witness;
};

// Checks that the limiting operator lands in the fixed set and is
// idempotent at n seeded points.
LimitingReport limiting_properties_check(const Operator& T, long n, unsigned long long seed,
                                         double tol);

enum class LimitVerdict { projection, not_projection };

struct ClassifyWitness {
  Vector x;
  Vector limit;          // Tinf x
  Vector nearest_fixed;  // P_{Fix T} x
  double dist_limit = 0.0;
  double dist_nearest = 0.0;
};

struct ClassifyReport {
  LimitVerdict verdict = LimitVerdict::projection;
  std::optional<ClassifyWitness> witness;
  ValueEstimate limit_modulus_estimate;
  long points_checked = 0;
};

// Compares the limiting operator against the projection onto the supplied
// fixed set. The fixed set is validated first: sampled limits must lie in
// it and sampled points of it must be fixed by T (tol 1e-8), otherwise
// FixSetMismatch. A not_projection verdict needs a witness differing by
// more than 10*tol; probes are checked before the random samples.
ClassifyReport classify_limit(const Operator& T, const ConvexSet& fix_set, long n,
                              unsigned long long seed, double tol,
                              const std::vector<Vector>& probes = {});

const char* to_string(LimitVerdict v);

}  // namespace averop
