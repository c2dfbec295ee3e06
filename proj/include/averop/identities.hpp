#pragma once

#include <string>
#include <vector>

#include "averop/modulus.hpp"
#include "averop/monotone.hpp"
#include "averop/types.hpp"

namespace averop {

struct IdentityCase {
  std::string name;
  double max_residual = 0.0;
  bool pass = false;
};

struct IdentityReport {
  std::string suite;
  std::vector<IdentityCase> cases;
  double max_residual = 0.0;
  bool pass = false;
};

// Named identity suites over built-in catalog operands. Each suite
// evaluates both sides of its identities through distinct routes at seeded
// points and reports the largest residual.
IdentityReport verify_identities(const std::string& suite, long points = 1000,
                                 unsigned long long seed = 0, double tol = 1e-9);
std::vector<std::string> identity_suites();

// Solves z = J_{alpha Y_mu(A)}(x) using only the inner resolvent, through
// the contraction w -> J_{mu A}((mu x + alpha w) / (mu + alpha)). This is
// the independent evaluation route the Yosida suites compare against.
Vector resolvent_of_yosida_by_iteration(const MonotoneOperator& A, double mu, double alpha,
                                        const Vector& x, double tol = 1e-13,
                                        long max_iter = 100000);

// Closed-form projector onto the slab {(x, y) : -y <= x <= 2}, the
// reference for the Dykstra-backed intersection projector.
Vector slab_reference_projection(const Vector& z);

}  // namespace averop
