#include "averop/convex_set.hpp"

#include <algorithm>
#include <cmath>

namespace averop {

namespace {

constexpr double kOrthoTol = 1e-12;

void check_orthonormal(const Matrix& basis, const char* what) {
  if (basis.cols() == 0) return;
  Matrix g = basis.transpose() * basis;
  g.diagonal().array() -= 1.0;
  if (g.cwiseAbs().maxCoeff() > kOrthoTol) {
    throw ValidationError(std::string(what) + ": basis columns must be orthonormal to 1e-12");
  }
}

}  // namespace

Vector project_halfspace(const HalfspaceData& h, const Vector& x) {
  const double t = h.normal.dot(x) - h.offset;
  if (t >= 0.0) return x;
  return x - (t / h.normal.squaredNorm()) * h.normal;
}

ConvexSet ConvexSet::box(Vector lower, Vector upper) {
  require_finite(lower, "Box lower");
  require_finite(upper, "Box upper");
  if (lower.size() != upper.size()) throw DimensionMismatch("Box bounds disagree in dimension");
  if (lower.size() < 1) throw ValidationError("Box needs dimension >= 1");
  if ((lower.array() > upper.array()).any()) throw ValidationError("Box requires lower <= upper");
  int dim = static_cast<int>(lower.size());
  return ConvexSet(std::make_shared<Node>(sets::Box{std::move(lower), std::move(upper)}), dim);
}

ConvexSet ConvexSet::ball(Vector center, double radius) {
  require_finite(center, "Ball center");
  if (!(radius >= 0.0) || !std::isfinite(radius)) throw ValidationError("Ball radius must be finite and >= 0");
  if (center.size() < 1) throw ValidationError("Ball needs dimension >= 1");
  int dim = static_cast<int>(center.size());
  return ConvexSet(std::make_shared<Node>(sets::Ball{std::move(center), radius}), dim);
}

ConvexSet ConvexSet::halfspace(Vector normal, double offset) {
  require_finite(normal, "Halfspace normal");
  if (!std::isfinite(offset)) throw ValidationError("Halfspace offset must be finite");
  if (normal.size() < 1 || normal.norm() == 0.0) throw ValidationError("Halfspace normal must be nonzero");
  int dim = static_cast<int>(normal.size());
  return ConvexSet(std::make_shared<Node>(sets::Halfspace{HalfspaceData{std::move(normal), offset}}), dim);
}

ConvexSet ConvexSet::linear_subspace(Matrix basis) {
  require_finite(basis, "LinearSubspace basis");
  if (basis.rows() < 1) throw ValidationError("LinearSubspace needs ambient dimension >= 1");
  if (basis.cols() >= basis.rows()) {
    throw ValidationError("LinearSubspace basis would span the whole space; the catalog has no encoding of X");
  }
  check_orthonormal(basis, "LinearSubspace");
  int dim = static_cast<int>(basis.rows());
  return ConvexSet(std::make_shared<Node>(sets::LinearSubspace{std::move(basis)}), dim);
}

ConvexSet ConvexSet::affine_subspace(Matrix basis, Vector anchor) {
  require_finite(basis, "AffineSubspace basis");
  require_finite(anchor, "AffineSubspace anchor");
  if (basis.rows() != anchor.size()) throw DimensionMismatch("AffineSubspace basis/anchor disagree");
  if (basis.rows() < 1) throw ValidationError("AffineSubspace needs ambient dimension >= 1");
  if (basis.cols() >= basis.rows()) {
    throw ValidationError("AffineSubspace basis would span the whole space; the catalog has no encoding of X");
  }
  check_orthonormal(basis, "AffineSubspace");
  int dim = static_cast<int>(basis.rows());
  return ConvexSet(std::make_shared<Node>(sets::AffineSubspace{std::move(basis), std::move(anchor)}), dim);
}

ConvexSet ConvexSet::singleton(Vector point) {
  require_finite(point, "Singleton point");
  if (point.size() < 1) throw ValidationError("Singleton needs dimension >= 1");
  int dim = static_cast<int>(point.size());
  return ConvexSet(std::make_shared<Node>(sets::Singleton{std::move(point)}), dim);
}

ConvexSet ConvexSet::halfspace_intersection(std::vector<HalfspaceData> parts, double tol,
                                            long max_sweeps) {
  if (parts.empty()) throw ValidationError("HalfspaceIntersection needs at least one halfspace");
  const Eigen::Index n = parts.front().normal.size();
  for (const auto& p : parts) {
    require_finite(p.normal, "HalfspaceIntersection normal");
    if (!std::isfinite(p.offset)) throw ValidationError("HalfspaceIntersection offset must be finite");
    if (p.normal.size() != n) throw DimensionMismatch("HalfspaceIntersection normals disagree in dimension");
    if (p.normal.norm() == 0.0) throw ValidationError("HalfspaceIntersection normal must be nonzero");
  }
  if (!(tol > 0.0) || max_sweeps < 1) throw ValidationError("HalfspaceIntersection needs tol > 0, max_sweeps >= 1");
  return ConvexSet(std::make_shared<Node>(sets::HalfspaceIntersection{std::move(parts), tol, max_sweeps}),
                   static_cast<int>(n));
}

namespace {

double violation(const sets::HalfspaceIntersection& hi, const Vector& x) {
  double v = 0.0;
  for (const auto& p : hi.parts) {
    v = std::max(v, (p.offset - p.normal.dot(x)) / p.normal.norm());
  }
  return v;
}

Vector dykstra(const sets::HalfspaceIntersection& hi, const Vector& x0) {
  // points already in the set are fixed exactly
  bool inside = true;
  for (const auto& p : hi.parts) {
    if (p.normal.dot(x0) < p.offset) {
      inside = false;
      break;
    }
  }
  if (inside) return x0;
  if (hi.parts.size() == 1) return project_halfspace(hi.parts.front(), x0);

  const size_t m = hi.parts.size();
  Vector x = x0;
  std::vector<Vector> corr(m, Vector::Zero(x0.size()));
  Vector prev = x;
  for (long sweep = 0; sweep < hi.max_sweeps; ++sweep) {
    for (size_t i = 0; i < m; ++i) {
      Vector y = x + corr[i];
      Vector p = project_halfspace(hi.parts[i], y);
      corr[i] = y - p;
      x = p;
    }
    const double change = (x - prev).norm();
    if (change <= hi.tol && violation(hi, x) <= hi.tol) return x;
    prev = x;
  }
  throw NonConvergence("Dykstra projection did not converge within " +
                       std::to_string(hi.max_sweeps) + " sweeps");
}

struct Projector {
  const Vector& x;

  Vector operator()(const sets::Box& b) const { return x.cwiseMax(b.lower).cwiseMin(b.upper); }
  Vector operator()(const sets::Ball& b) const {
    Vector d = x - b.center;
    const double n = d.norm();
    if (n <= b.radius) return x;
    return b.center + (b.radius / n) * d;
  }
  Vector operator()(const sets::Halfspace& h) const { return project_halfspace(h.h, x); }
  Vector operator()(const sets::LinearSubspace& s) const {
    if (s.basis.cols() == 0) return Vector::Zero(x.size());
    return s.basis * (s.basis.transpose() * x);
  }
  Vector operator()(const sets::AffineSubspace& s) const {
    if (s.basis.cols() == 0) return s.anchor;
    return s.anchor + s.basis * (s.basis.transpose() * (x - s.anchor));
  }
  Vector operator()(const sets::Singleton& s) const { return s.point; }
  Vector operator()(const sets::HalfspaceIntersection& hi) const { return dykstra(hi, x); }
};

}  // namespace

Vector ConvexSet::project(const Vector& x) const {
  require_dim(x, dim_, "ConvexSet::project");
  return std::visit(Projector{x}, *node_);
}

double ConvexSet::distance(const Vector& x) const { return (x - project(x)).norm(); }

bool ConvexSet::contains(const Vector& x, double tol) const {
  require_dim(x, dim_, "ConvexSet::contains");
  if (const auto* h = std::get_if<sets::Halfspace>(node_.get())) {
    return h->h.normal.dot(x) - h->h.offset >= -tol * h->h.normal.norm();
  }
  if (const auto* hi = std::get_if<sets::HalfspaceIntersection>(node_.get())) {
    return violation(*hi, x) <= tol;
  }
  return distance(x) <= tol;
}

bool ConvexSet::is_singleton() const {
  struct V {
    bool operator()(const sets::Box& b) const { return b.lower == b.upper; }
    bool operator()(const sets::Ball& b) const { return b.radius == 0.0; }
    bool operator()(const sets::Halfspace&) const { return false; }
    bool operator()(const sets::LinearSubspace& s) const { return s.basis.cols() == 0; }
    bool operator()(const sets::AffineSubspace& s) const { return s.basis.cols() == 0; }
    bool operator()(const sets::Singleton&) const { return true; }
    bool operator()(const sets::HalfspaceIntersection&) const { return false; }
  };
  return std::visit(V{}, *node_);
}

}  // namespace averop
