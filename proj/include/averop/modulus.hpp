#pragma once

#include <string>
#include <vector>

#include "averop/operator.hpp"
#include "averop/types.hpp"

namespace averop {

struct TraceStep {
  std::string rule;
  std::string note;
};

// Certified interval [lower, upper] for the modulus of averagedness k(T),
// with the chain of rules that produced it.
struct ModulusBound {
  double lower = 0.0;
  double upper = 1.0;
  bool exact = false;
  std::vector<TraceStep> trace;

  static ModulusBound exactly(double k, TraceStep step);
  ModulusBound& then(TraceStep step);
};

// Exact value or tightest derivable interval for k(T) by structural
// recursion over the operator tree.
ModulusBound exact_modulus(const Operator& T);

// min { k in [0,1] : 2(1-k) sym(M) - M'M - (1-2k) I is PSD }, found by
// bisection with a smallest-eigenvalue test. Equals k(M) for nonexpansive M.
double matrix_modulus(const Matrix& M);

// (1 - min piece slope) / 2 for a continuous piecewise-affine map on R.
double scalar_modulus(const ops::ScalarPiecewise& g);
double scalar_modulus(const Operator& T);

// Exact modulus of the proximal map of scale*f, and of J_{alpha A}.
double prox_modulus(const ConvexFunction& f, double scale = 1.0);
double resolvent_modulus(const MonotoneOperator& A, double alpha);

// Two distinct nonzero proper linear subspaces of a common ambient space
// together with the cosine of their Friedrichs angle.
class SubspacePair {
 public:
  static SubspacePair make(const ConvexSet& U, const ConvexSet& V);

  const Matrix& basis_u() const { return bu_; }
  const Matrix& basis_v() const { return bv_; }
  double friedrichs_cosine() const { return cosine_; }

 private:
  SubspacePair(Matrix bu, Matrix bv, double cosine)
      : bu_(std::move(bu)), bv_(std::move(bv)), cosine_(cosine) {}
  Matrix bu_, bv_;
  double cosine_ = 0.0;
};

// (1 + c_F) / (2 + c_F) for the composition P_V P_U.
double two_subspace_modulus(const SubspacePair& pair);

// Largest principal-angle cosine of span(Bu), span(Bv) after removing
// their intersection (rank-revealing cutoff 1e-10).
double friedrichs_cosine(const Matrix& Bu, const Matrix& Bv);

}  // namespace averop
