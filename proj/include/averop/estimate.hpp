#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "averop/monotone.hpp"
#include "averop/operator.hpp"
#include "averop/types.hpp"

namespace averop {

enum class Quantity { modulus, cocoercive_value, monotone_value, lipschitz_value };
enum class Direction { lower_bound, upper_bound };

const char* to_string(Quantity q);
const char* to_string(Direction d);

// A sampled one-sided bound with the pair that attains it. Lower bounds for
// the modulus and the Lipschitz value (suprema sampled from below), upper
// bounds for the cocoercive and monotone values (infima sampled from above).
struct ValueEstimate {
  Quantity quantity = Quantity::modulus;
  Direction direction = Direction::lower_bound;
  double value = 0.0;
  Vector witness_x, witness_y;
  long samples_used = 0;
  long skipped = 0;
  unsigned long long seed = 0;
};

struct SamplePair {
  Vector x, y;
};

// Pre-generated pair list: standard-normal coordinates cycling through
// scales {0.1, 1, 10}. Estimates reduce over this list with a commutative
// max/min, so evaluation order cannot change the result.
std::vector<SamplePair> sample_pairs(int dim, long n, unsigned long long seed);

// Structure-aware pairs where extremal ratios tend to live: boundary points
// paired with outward normals, eigen-directions of linear parts, breakpoint
// straddles of scalar piecewise maps.
std::vector<SamplePair> adversarial_pairs(const Operator& T);

using VectorMap = std::function<Vector(const Vector&)>;

ValueEstimate estimate_modulus(const Operator& T, long n, unsigned long long seed,
                               int refine_steps = 0);
ValueEstimate estimate_modulus_on(const Operator& T, const std::vector<SamplePair>& pairs,
                                  unsigned long long seed, int refine_steps = 0);

ValueEstimate estimate_value(Quantity kind, const VectorMap& A, int dim, long n,
                             unsigned long long seed);
ValueEstimate estimate_value(Quantity kind, const Operator& T, long n, unsigned long long seed);
ValueEstimate estimate_value(Quantity kind, const MonotoneOperator& A, long n,
                             unsigned long long seed);
ValueEstimate estimate_value_on(Quantity kind, const VectorMap& A,
                                const std::vector<SamplePair>& pairs, unsigned long long seed);

// First sampled pair violating the averagedness inequality at k_claimed by
// more than 1e-10; a returned witness proves k(T) > k_claimed.
std::optional<SamplePair> falsify_averaged(const Operator& T, double k_claimed, long n,
                                           unsigned long long seed);

struct InversionResult {
  Vector x;
  double residual = 0.0;
  long iterations = 0;
};

// Solves T x = v for normally nonexpansive T by iterating the Banach
// contraction x -> x - T x + v from x0 = v.
InversionResult invert_by_contraction(const Operator& T, const Vector& v, double tol,
                                      long max_iter);

struct BiLipschitzReport {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double lower_factor = 0.0;  // 2 (1/2 - k)
  long pairs_checked = 0;
};

// Asserts (1 - 2k) ||x-y|| <= ||Tx-Ty|| <= ||x-y|| on sampled pairs for a
// claimed upper bound k < 1/2; throws ViolationFound with the witness pair.
BiLipschitzReport bilipschitz_check(const Operator& T, double k, long n, unsigned long long seed);

}  // namespace averop
