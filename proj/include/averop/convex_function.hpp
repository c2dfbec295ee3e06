#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "averop/convex_set.hpp"
#include "averop/types.hpp"

namespace averop {

class ConvexFunction;

namespace funcs {

struct Indicator {
  ConvexSet set;
};
// f(x) = x' Q x / 2 with Q symmetric PSD.
struct Quadratic {
  Matrix Q;
};
// f(x) = (alpha/2) dist(x, C)^2.
struct HalfDistanceSquared {
  ConvexSet set;
  double alpha = 1.0;
};
// f = alpha * H_mu, the Moreau envelope of the norm with parameter mu.
struct Huber {
  double mu = 1.0;
  double alpha = 1.0;
  int dim = 1;
};
// f = lambda * sigma_C (support function).
struct Support {
  ConvexSet set;
  double lambda = 1.0;
};
// f = alpha * e_mu(inner).
struct MoreauEnvelope {
  std::shared_ptr<const ConvexFunction> inner;
  double mu = 1.0;
  double alpha = 1.0;
};
// Continuous piecewise-affine convex function on R, defined up to an additive
// constant by strictly increasing breakpoints and nondecreasing slopes
// (slopes.size() == breakpoints.size() + 1).
struct ScalarPiecewiseConvex {
  std::vector<double> breakpoints;
  std::vector<double> slopes;
};

}  // namespace funcs

// Proper lower semicontinuous convex function from a fixed catalog. Every
// variant has a closed-form proximal map.
class ConvexFunction {
 public:
  using Node = std::variant<funcs::Indicator, funcs::Quadratic, funcs::HalfDistanceSquared,
                            funcs::Huber, funcs::Support, funcs::MoreauEnvelope,
                            funcs::ScalarPiecewiseConvex>;

  static ConvexFunction indicator(ConvexSet set);
  static ConvexFunction quadratic(Matrix Q);
  static ConvexFunction half_distance_squared(ConvexSet set, double alpha);
  static ConvexFunction huber(double mu, double alpha, int dim);
  static ConvexFunction support(ConvexSet set, double lambda);
  static ConvexFunction moreau_envelope(ConvexFunction inner, double mu, double alpha);
  static ConvexFunction scalar_piecewise(std::vector<double> breakpoints,
                                         std::vector<double> slopes);

  // Minimizer of scale*f(u) + ||u - x||^2 / 2.
  Vector prox(const Vector& x, double scale = 1.0) const;

  // Gradient where the subdifferential is single-valued; throws
  // UnsupportedFunction for variants that are multivalued at x.
  Vector gradient(const Vector& x) const;

  // Best Lipschitz constant of the gradient; +inf when f is not
  // Lipschitz smooth. Exact for every catalog variant.
  double gradient_lipschitz() const;
  bool lipschitz_smooth() const { return gradient_lipschitz() < kInf; }

  int dim() const { return dim_; }
  const Node& node() const { return *node_; }

 private:
  ConvexFunction(std::shared_ptr<const Node> node, int dim) : node_(std::move(node)), dim_(dim) {}

  std::shared_ptr<const Node> node_;
  int dim_ = 0;
};

}  // namespace averop
