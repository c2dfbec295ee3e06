#include "averop/monotone.hpp"

#include <cmath>

namespace averop {

MonotoneOperator MonotoneOperator::subdifferential(ConvexFunction f) {
  int dim = f.dim();
  return MonotoneOperator(std::make_shared<Node>(monos::Subdifferential{std::move(f)}), dim);
}

MonotoneOperator MonotoneOperator::linear(Matrix M) {
  require_finite(M, "LinearMonotone M");
  if (M.rows() != M.cols() || M.rows() < 1) throw ValidationError("LinearMonotone M must be square");
  Matrix S = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < -1e-12) {
    throw ValidationError("LinearMonotone M must have positive semidefinite symmetric part");
  }
  int dim = static_cast<int>(M.rows());
  return MonotoneOperator(std::make_shared<Node>(monos::LinearMonotone{std::move(M)}), dim);
}

MonotoneOperator MonotoneOperator::normal_cone(ConvexSet set) {
  int dim = set.dim();
  return MonotoneOperator(std::make_shared<Node>(monos::NormalCone{std::move(set)}), dim);
}

MonotoneOperator MonotoneOperator::scaled(double alpha, MonotoneOperator inner) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ValidationError("Scaled needs alpha > 0");
  int dim = inner.dim();
  auto ptr = std::make_shared<const MonotoneOperator>(std::move(inner));
  return MonotoneOperator(std::make_shared<Node>(monos::Scaled{alpha, std::move(ptr)}), dim);
}

MonotoneOperator MonotoneOperator::yosida(double mu, MonotoneOperator inner) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ValidationError("Yosida needs mu > 0");
  int dim = inner.dim();
  auto ptr = std::make_shared<const MonotoneOperator>(std::move(inner));
  return MonotoneOperator(std::make_shared<Node>(monos::Yosida{mu, std::move(ptr)}), dim);
}

namespace {

struct ResolventVisitor {
  const Vector& x;
  double a;  // > 0

  Vector operator()(const monos::Subdifferential& m) const { return m.f.prox(x, a); }
  Vector operator()(const monos::LinearMonotone& m) const {
    Matrix A = a * m.M;
    A.diagonal().array() += 1.0;
    return A.partialPivLu().solve(x);
  }
  Vector operator()(const monos::NormalCone& m) const { return m.set.project(x); }
  Vector operator()(const monos::Scaled& m) const { return m.inner->resolvent(x, a * m.alpha); }
  Vector operator()(const monos::Yosida& m) const {
    // J_{a Y_mu(A)} = mu/(mu+a) Id + a/(mu+a) J_{(mu+a) A}
    return (m.mu / (m.mu + a)) * x + (a / (m.mu + a)) * m.inner->resolvent(x, m.mu + a);
  }
};

struct ApplyVisitor {
  const Vector& x;

  Vector operator()(const monos::Subdifferential& m) const { return m.f.gradient(x); }
  Vector operator()(const monos::LinearMonotone& m) const { return m.M * x; }
  Vector operator()(const monos::NormalCone&) const {
    throw UnsupportedFunction("NormalCone is not single-valued with full domain");
  }
  Vector operator()(const monos::Scaled& m) const { return m.alpha * m.inner->apply(x); }
  Vector operator()(const monos::Yosida& m) const {
    return (x - m.inner->resolvent(x, m.mu)) / m.mu;
  }
};

struct CanApplyVisitor {
  bool operator()(const monos::Subdifferential& m) const { return m.f.lipschitz_smooth(); }
  bool operator()(const monos::LinearMonotone&) const { return true; }
  bool operator()(const monos::NormalCone&) const { return false; }
  bool operator()(const monos::Scaled& m) const { return m.inner->can_apply(); }
  bool operator()(const monos::Yosida&) const { return true; }
};

struct CocoerciveVisitor {
  double operator()(const monos::Subdifferential& m) const {
    const double g = m.f.gradient_lipschitz();
    if (g == 0.0) return kInf;
    if (g == kInf) return 0.0;
    return 1.0 / g;
  }
  double operator()(const monos::LinearMonotone& m) const { return linear_cocoercive_value(m.M); }
  double operator()(const monos::NormalCone&) const { return 0.0; }
  double operator()(const monos::Scaled& m) const {
    const double c = m.inner->cocoercive_value();
    return c == kInf ? kInf : c / m.alpha;
  }
  double operator()(const monos::Yosida& m) const {
    const double c = m.inner->cocoercive_value();
    return c == kInf ? kInf : c + m.mu;
  }
};

}  // namespace

Vector MonotoneOperator::resolvent(const Vector& x, double alpha) const {
  require_dim(x, dim_, "MonotoneOperator::resolvent");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("resolvent scale must be >= 0");
  if (alpha == 0.0) return x;
  return std::visit(ResolventVisitor{x, alpha}, *node_);
}

Vector MonotoneOperator::apply(const Vector& x) const {
  require_dim(x, dim_, "MonotoneOperator::apply");
  return std::visit(ApplyVisitor{x}, *node_);
}

bool MonotoneOperator::can_apply() const { return std::visit(CanApplyVisitor{}, *node_); }

double MonotoneOperator::cocoercive_value() const { return std::visit(CocoerciveVisitor{}, *node_); }

double linear_cocoercive_value(const Matrix& M) {
  const Eigen::Index n = M.rows();
  if (M.cwiseAbs().maxCoeff() == 0.0) return kInf;  // the zero operator is constant
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = 1e-12 * sv(0);
  Eigen::Index r = 0;
  while (r < n && sv(r) > cutoff) ++r;
  if (r == 0) return kInf;
  // restrict to ran M' = (ker M)^perp; on ker M both forms vanish
  Matrix W = svd.matrixV().leftCols(r);
  Matrix S = 0.5 * (M + M.transpose());
  Matrix Sr = W.transpose() * S * W;
  Matrix Gr = W.transpose() * (M.transpose() * M) * W;
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(Sr, Gr, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  return std::max(0.0, ges.eigenvalues()(0));
}

}  // namespace averop
