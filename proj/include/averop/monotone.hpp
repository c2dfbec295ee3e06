#pragma once

#include <memory>
#include <variant>

#include "averop/convex_function.hpp"
#include "averop/convex_set.hpp"
#include "averop/types.hpp"

namespace averop {

class MonotoneOperator;

namespace monos {

struct Subdifferential {
  ConvexFunction f;
};
// x -> M x with M + M' positive semidefinite (skew allowed).
struct LinearMonotone {
  Matrix M;
};
struct NormalCone {
  ConvexSet set;
};
// alpha * A
struct Scaled {
  double alpha = 1.0;
  std::shared_ptr<const MonotoneOperator> inner;
};
// Y_mu(A) = (mu Id + A^{-1})^{-1}; evaluated via mu^{-1}(Id - J_{mu A}).
struct Yosida {
  double mu = 1.0;
  std::shared_ptr<const MonotoneOperator> inner;
};

}  // namespace monos

// Maximally monotone operator from a fixed catalog with closed-form
// resolvents.
class MonotoneOperator {
 public:
  using Node = std::variant<monos::Subdifferential, monos::LinearMonotone, monos::NormalCone,
                            monos::Scaled, monos::Yosida>;

  static MonotoneOperator subdifferential(ConvexFunction f);
  static MonotoneOperator linear(Matrix M);
  static MonotoneOperator normal_cone(ConvexSet set);
  static MonotoneOperator scaled(double alpha, MonotoneOperator inner);
  static MonotoneOperator yosida(double mu, MonotoneOperator inner);

  // J_{alpha A} x; alpha == 0 gives the identity.
  Vector resolvent(const Vector& x, double alpha) const;

  // Pointwise evaluation where the operator is single-valued with full
  // domain; throws UnsupportedFunction otherwise.
  Vector apply(const Vector& x) const;
  bool can_apply() const;

  // Exact best cocoercivity constant c(A) in [0, +inf].
  double cocoercive_value() const;

  int dim() const { return dim_; }
  const Node& node() const { return *node_; }

 private:
  MonotoneOperator(std::shared_ptr<const Node> node, int dim) : node_(std::move(node)), dim_(dim) {}

  std::shared_ptr<const Node> node_;
  int dim_ = 0;
};

// Best c with <x, Mx> >= c ||Mx||^2, computed from the generalized
// eigenproblem of (sym M, M'M) restricted to the complement of ker M.
double linear_cocoercive_value(const Matrix& M);

}  // namespace averop
