#include "averop/convex_function.hpp"

#include <cmath>

namespace averop {

ConvexFunction ConvexFunction::indicator(ConvexSet set) {
  int dim = set.dim();
  return ConvexFunction(std::make_shared<Node>(funcs::Indicator{std::move(set)}), dim);
}

ConvexFunction ConvexFunction::quadratic(Matrix Q) {
  require_finite(Q, "Quadratic Q");
  if (Q.rows() != Q.cols() || Q.rows() < 1) throw ValidationError("Quadratic Q must be square");
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ValidationError("Quadratic Q must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(Q, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < -1e-12) throw ValidationError("Quadratic Q must be positive semidefinite");
  int dim = static_cast<int>(Q.rows());
  return ConvexFunction(std::make_shared<Node>(funcs::Quadratic{std::move(Q)}), dim);
}

ConvexFunction ConvexFunction::half_distance_squared(ConvexSet set, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ValidationError("HalfDistanceSquared needs alpha > 0");
  int dim = set.dim();
  return ConvexFunction(std::make_shared<Node>(funcs::HalfDistanceSquared{std::move(set), alpha}), dim);
}

ConvexFunction ConvexFunction::huber(double mu, double alpha, int dim) {
  if (!(mu > 0.0) || !(alpha > 0.0) || !std::isfinite(mu) || !std::isfinite(alpha)) {
    throw ValidationError("Huber needs mu > 0 and alpha > 0");
  }
  if (dim < 1) throw ValidationError("Huber needs dimension >= 1");
  return ConvexFunction(std::make_shared<Node>(funcs::Huber{mu, alpha, dim}), dim);
}

ConvexFunction ConvexFunction::support(ConvexSet set, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("Support needs lambda > 0");
  int dim = set.dim();
  return ConvexFunction(std::make_shared<Node>(funcs::Support{std::move(set), lambda}), dim);
}

ConvexFunction ConvexFunction::moreau_envelope(ConvexFunction inner, double mu, double alpha) {
  if (!(mu > 0.0) || !(alpha > 0.0) || !std::isfinite(mu) || !std::isfinite(alpha)) {
    throw ValidationError("MoreauEnvelope needs mu > 0 and alpha > 0");
  }
  int dim = inner.dim();
  auto ptr = std::make_shared<const ConvexFunction>(std::move(inner));
  return ConvexFunction(std::make_shared<Node>(funcs::MoreauEnvelope{std::move(ptr), mu, alpha}), dim);
}

ConvexFunction ConvexFunction::scalar_piecewise(std::vector<double> breakpoints,
                                                std::vector<double> slopes) {
  if (slopes.size() != breakpoints.size() + 1) {
    throw ValidationError("ScalarPiecewiseConvex needs one more slope than breakpoints");
  }
  for (size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i] < breakpoints[i + 1])) {
      throw ValidationError("ScalarPiecewiseConvex breakpoints must be strictly increasing");
    }
  }
  for (double b : breakpoints) {
    if (!std::isfinite(b)) throw ValidationError("ScalarPiecewiseConvex breakpoints must be finite");
  }
  for (size_t i = 0; i < slopes.size(); ++i) {
    if (!std::isfinite(slopes[i])) throw ValidationError("ScalarPiecewiseConvex slopes must be finite");
    if (i > 0 && slopes[i] < slopes[i - 1]) {
      throw ValidationError("ScalarPiecewiseConvex slopes must be nondecreasing");
    }
  }
  return ConvexFunction(
      std::make_shared<Node>(funcs::ScalarPiecewiseConvex{std::move(breakpoints), std::move(slopes)}),
      1);
}

namespace {

Vector shrink_to_ball(const Vector& x, double radius) {
  // prox of radius * ||.||, the block soft threshold
  const double n = x.norm();
  if (n <= radius) return Vector::Zero(x.size());
  return (1.0 - radius / n) * x;
}

double scalar_pwc_prox(const funcs::ScalarPiecewiseConvex& f, double x, double s) {
  const auto& b = f.breakpoints;
  const auto& sl = f.slopes;
  if (b.empty() || x < b[0] + s * sl[0]) return x - s * sl[0];
  for (size_t i = 0; i < b.size(); ++i) {
    // here x >= b[i] + s*sl[i]
    if (x <= b[i] + s * sl[i + 1]) return b[i];
    const bool last = (i + 1 == b.size());
    if (last || x < b[i + 1] + s * sl[i + 1]) return x - s * sl[i + 1];
  }
  return x - s * sl.back();
}

struct ProxVisitor {
  const Vector& x;
  double s;  // > 0

  Vector operator()(const funcs::Indicator& f) const { return f.set.project(x); }
  Vector operator()(const funcs::Quadratic& f) const {
    Matrix A = s * f.Q;
    A.diagonal().array() += 1.0;
    return A.ldlt().solve(x);
  }
  Vector operator()(const funcs::HalfDistanceSquared& f) const {
    const double g = s * f.alpha;
    return (1.0 / (1.0 + g)) * x + (g / (1.0 + g)) * f.set.project(x);
  }
  Vector operator()(const funcs::Huber& f) const {
    const double g = s * f.alpha;
    return (f.mu / (f.mu + g)) * x + (g / (f.mu + g)) * shrink_to_ball(x, f.mu + g);
  }
  Vector operator()(const funcs::Support& f) const {
    const double g = s * f.lambda;
    return x - g * f.set.project(x / g);
  }
  Vector operator()(const funcs::MoreauEnvelope& f) const {
    const double g = s * f.alpha;
    return (f.mu / (f.mu + g)) * x + (g / (f.mu + g)) * f.inner->prox(x, f.mu + g);
  }
  Vector operator()(const funcs::ScalarPiecewiseConvex& f) const {
    Vector r(1);
    r(0) = scalar_pwc_prox(f, x(0), s);
    return r;
  }
};

struct GradientVisitor {
  const Vector& x;

  Vector operator()(const funcs::Indicator&) const {
    throw UnsupportedFunction("Indicator has a multivalued subdifferential");
  }
  Vector operator()(const funcs::Quadratic& f) const { return f.Q * x; }
  Vector operator()(const funcs::HalfDistanceSquared& f) const {
    return f.alpha * (x - f.set.project(x));
  }
  Vector operator()(const funcs::Huber& f) const {
    const double n = x.norm();
    if (n <= f.mu) return (f.alpha / f.mu) * x;
    return (f.alpha / n) * x;
  }
  Vector operator()(const funcs::Support& f) const {
    if (!f.set.is_singleton()) {
      throw UnsupportedFunction("Support function of a non-singleton set is not differentiable at 0");
    }
    return f.lambda * f.set.project(Vector::Zero(x.size()));
  }
  Vector operator()(const funcs::MoreauEnvelope& f) const {
    return (f.alpha / f.mu) * (x - f.inner->prox(x, f.mu));
  }
  Vector operator()(const funcs::ScalarPiecewiseConvex& f) const {
    size_t i = 0;
    while (i < f.breakpoints.size() && x(0) >= f.breakpoints[i]) ++i;
    Vector r(1);
    r(0) = f.slopes[i];
    return r;
  }
};

struct GradLipVisitor {
  double operator()(const funcs::Indicator&) const { return kInf; }
  double operator()(const funcs::Quadratic& f) const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(f.Q, Eigen::EigenvaluesOnly);
    return std::max(0.0, es.eigenvalues()(es.eigenvalues().size() - 1));
  }
  double operator()(const funcs::HalfDistanceSquared& f) const { return f.alpha; }
  double operator()(const funcs::Huber& f) const { return f.alpha / f.mu; }
  double operator()(const funcs::Support& f) const { return f.set.is_singleton() ? 0.0 : kInf; }
  double operator()(const funcs::MoreauEnvelope& f) const {
    const double g = f.inner->gradient_lipschitz();
    if (g == kInf) return f.alpha / f.mu;
    return f.alpha * (g / (1.0 + f.mu * g));
  }
  double operator()(const funcs::ScalarPiecewiseConvex& f) const {
    return f.slopes.front() == f.slopes.back() ? 0.0 : kInf;
  }
};

}  // namespace

Vector ConvexFunction::prox(const Vector& x, double scale) const {
  require_dim(x, dim_, "ConvexFunction::prox");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ValidationError("prox scale must be > 0");
  return std::visit(ProxVisitor{x, scale}, *node_);
}

Vector ConvexFunction::gradient(const Vector& x) const {
  require_dim(x, dim_, "ConvexFunction::gradient");
  return std::visit(GradientVisitor{x}, *node_);
}

double ConvexFunction::gradient_lipschitz() const { return std::visit(GradLipVisitor{}, *node_); }

}  // namespace averop
