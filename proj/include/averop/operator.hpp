#pragma once

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "averop/convex_function.hpp"
#include "averop/convex_set.hpp"
#include "averop/monotone.hpp"
#include "averop/types.hpp"

namespace averop {

class Operator;

namespace ops {

struct Identity {
  int dim = 1;
};
struct Constant {
  Vector value;
};
// x -> x + offset
struct Shift {
  Vector offset;
};
// x -> M x, certified nonexpansive at construction.
struct LinearMatrix {
  Matrix M;
  double spectral_norm = 0.0;
};
struct Affine {
  Matrix M;
  Vector offset;
  double spectral_norm = 0.0;
};
struct Projection {
  ConvexSet set;
};
// 2 P_C - Id
struct Reflector {
  ConvexSet set;
};
struct Prox {
  ConvexFunction f;
};
// J_{alpha A}; alpha == 0 degenerates to the identity.
struct Resolvent {
  MonotoneOperator A;
  double alpha = 1.0;
};
// 2 J_A - Id
struct ReflectedResolvent {
  MonotoneOperator A;
};
// (1 - lambda) Id + lambda T
struct Relaxation {
  double lambda = 0.5;
  std::shared_ptr<const Operator> inner;
};
// factors[0] is applied last: Compose({S, T}) x = S(T(x)).
struct Compose {
  std::vector<Operator> factors;
};
struct ConvexCombination {
  std::vector<double> weights;
  std::vector<Operator> terms;
};
// x -> x - P_A x + P_B(2 P_A x - x)
struct DouglasRachford {
  ConvexSet a, b;
};
struct AffinePiece {
  double slope = 0.0;
  double intercept = 0.0;
};
// Continuous piecewise-affine map on R with all slopes in [-1, 1].
struct ScalarPiecewise {
  std::vector<double> breakpoints;
  std::vector<AffinePiece> pieces;  // pieces.size() == breakpoints.size() + 1
};
// Pointwise fixed-point limit of the inner operator's orbit.
struct LimitOperator {
  std::shared_ptr<const Operator> inner;
  double tol = 1e-10;
  long max_iter = 1000000;
};

}  // namespace ops

// Immutable tree-structured nonexpansive operator on R^n. Evaluation is
// pure and deterministic; nonexpansiveness is certified at construction
// for matrices and structural for every other constructor.
class Operator {
 public:
  using Node = std::variant<ops::Identity, ops::Constant, ops::Shift, ops::LinearMatrix,
                            ops::Affine, ops::Projection, ops::Reflector, ops::Prox,
                            ops::Resolvent, ops::ReflectedResolvent, ops::Relaxation, ops::Compose,
                            ops::ConvexCombination, ops::DouglasRachford, ops::ScalarPiecewise,
                            ops::LimitOperator>;

  static Operator identity(int dim);
  static Operator constant(Vector value);
  static Operator shift(Vector offset);
  static Operator linear(Matrix M);
  static Operator affine(Matrix M, Vector offset);
  static Operator projection(ConvexSet set);
  static Operator reflector(ConvexSet set);
  static Operator prox(ConvexFunction f);
  static Operator resolvent(MonotoneOperator A, double alpha = 1.0);
  static Operator reflected_resolvent(MonotoneOperator A);
  static Operator relaxation(double lambda, Operator inner);
  static Operator compose(std::vector<Operator> factors);
  static Operator convex_combination(std::vector<double> weights, std::vector<Operator> terms);
  static Operator douglas_rachford(ConvexSet a, ConvexSet b);
  static Operator scalar_piecewise(std::vector<double> breakpoints,
                                   std::vector<ops::AffinePiece> pieces);
  static Operator limit(Operator inner, double tol = 1e-10, long max_iter = 1000000);

  Vector operator()(const Vector& x) const;
  int dim() const { return dim_; }
  const Node& node() const { return *node_; }

 private:
  Operator(std::shared_ptr<const Node> node, int dim) : node_(std::move(node)), dim_(dim) {}

  std::shared_ptr<const Node> node_;
  int dim_ = 0;
};

// Spectral norm by power iteration on M'M (200 steps with a Rayleigh
// quotient convergence check), floored by row/column norm lower bounds.
double certified_spectral_norm(const Matrix& M);

// --- structural analysis -------------------------------------------------

struct AffineMap {
  Matrix M;
  Vector b;
};
AffineMap affine_compose(const AffineMap& outer, const AffineMap& inner);

// Exact affine representation T x = M x + b when the whole tree is affine.
std::optional<AffineMap> try_affine(const Operator& T);
std::optional<AffineMap> projection_affine(const ConvexSet& set);
std::optional<AffineMap> prox_affine(const ConvexFunction& f, double scale);
std::optional<AffineMap> resolvent_affine(const MonotoneOperator& A, double alpha);

enum class Tri { yes, no, unknown };

struct BijectivityFlags {
  Tri injective = Tri::unknown;
  Tri surjective = Tri::unknown;
};
BijectivityFlags bijectivity(const Operator& T);

// True when the tree is structurally a constant map.
bool is_constant_map(const Operator& T);

}  // namespace averop
