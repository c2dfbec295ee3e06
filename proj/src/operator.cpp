#include "averop/operator.hpp"

#include <algorithm>
#include <cmath>

namespace averop {

namespace {

constexpr double kNonexpansiveSlack = 1e-9;

int common_dim(const std::vector<Operator>& ops, const char* what) {
  if (ops.empty()) throw ValidationError(std::string(what) + ": needs at least one operator");
  int d = ops.front().dim();
  for (const auto& t : ops) {
    if (t.dim() != d) throw DimensionMismatch(std::string(what) + ": operator dimensions disagree");
  }
  return d;
}

}  // namespace

double certified_spectral_norm(const Matrix& M) {
  if (M.rows() != M.cols() || M.rows() < 1) throw ValidationError("spectral norm: matrix must be square");
  require_finite(M, "matrix");
  const Eigen::Index n = M.rows();
  if (M.cwiseAbs().maxCoeff() == 0.0) return 0.0;

  const Matrix S = M.transpose() * M;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = 1.0 + 0.25 * static_cast<double>(i % 7) / 7.0;
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    Vector w = S * v;
    const double nw = w.norm();
    if (nw == 0.0) break;
    w /= nw;
    const double next = w.dot(S * w);
    const bool settled = std::abs(next - lambda) <= 1e-14 * std::max(1.0, std::abs(next));
    lambda = next;
    v = w;
    if (settled && it >= 8) break;
  }
  double est = std::sqrt(std::max(0.0, lambda));
  // ||M|| >= max column norm and max row norm
  for (Eigen::Index j = 0; j < n; ++j) {
    est = std::max(est, M.col(j).norm());
    est = std::max(est, M.row(j).norm());
  }
  return est;
}

Operator Operator::identity(int dim) {
  if (dim < 1) throw ValidationError("Identity needs dimension >= 1");
  return Operator(std::make_shared<Node>(ops::Identity{dim}), dim);
}

Operator Operator::constant(Vector value) {
  require_finite(value, "Constant value");
  if (value.size() < 1) throw ValidationError("Constant needs dimension >= 1");
  int dim = static_cast<int>(value.size());
  return Operator(std::make_shared<Node>(ops::Constant{std::move(value)}), dim);
}

Operator Operator::shift(Vector offset) {
  require_finite(offset, "Shift offset");
  if (offset.size() < 1) throw ValidationError("Shift needs dimension >= 1");
  int dim = static_cast<int>(offset.size());
  return Operator(std::make_shared<Node>(ops::Shift{std::move(offset)}), dim);
}

Operator Operator::linear(Matrix M) {
  const double nrm = certified_spectral_norm(M);
  if (nrm > 1.0 + kNonexpansiveSlack) {
    throw NotNonexpansive("LinearMatrix: spectral norm " + std::to_string(nrm) + " exceeds 1");
  }
  int dim = static_cast<int>(M.rows());
  return Operator(std::make_shared<Node>(ops::LinearMatrix{std::move(M), nrm}), dim);
}

Operator Operator::affine(Matrix M, Vector offset) {
  const double nrm = certified_spectral_norm(M);
  if (nrm > 1.0 + kNonexpansiveSlack) {
    throw NotNonexpansive("Affine: spectral norm " + std::to_string(nrm) + " exceeds 1");
  }
  require_finite(offset, "Affine offset");
  if (offset.size() != M.rows()) throw DimensionMismatch("Affine: matrix/offset disagree");
  int dim = static_cast<int>(M.rows());
  return Operator(std::make_shared<Node>(ops::Affine{std::move(M), std::move(offset), nrm}), dim);
}

Operator Operator::projection(ConvexSet set) {
  int dim = set.dim();
  return Operator(std::make_shared<Node>(ops::Projection{std::move(set)}), dim);
}

Operator Operator::reflector(ConvexSet set) {
  int dim = set.dim();
  return Operator(std::make_shared<Node>(ops::Reflector{std::move(set)}), dim);
}

Operator Operator::prox(ConvexFunction f) {
  int dim = f.dim();
  return Operator(std::make_shared<Node>(ops::Prox{std::move(f)}), dim);
}

Operator Operator::resolvent(MonotoneOperator A, double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("Resolvent needs alpha >= 0");
  int dim = A.dim();
  return Operator(std::make_shared<Node>(ops::Resolvent{std::move(A), alpha}), dim);
}

Operator Operator::reflected_resolvent(MonotoneOperator A) {
  int dim = A.dim();
  return Operator(std::make_shared<Node>(ops::ReflectedResolvent{std::move(A)}), dim);
}

Operator Operator::relaxation(double lambda, Operator inner) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError("Relaxation needs lambda in [0, 1]");
  int dim = inner.dim();
  auto ptr = std::make_shared<const Operator>(std::move(inner));
  return Operator(std::make_shared<Node>(ops::Relaxation{lambda, std::move(ptr)}), dim);
}

Operator Operator::compose(std::vector<Operator> factors) {
  int dim = common_dim(factors, "Compose");
  return Operator(std::make_shared<Node>(ops::Compose{std::move(factors)}), dim);
}

Operator Operator::convex_combination(std::vector<double> weights, std::vector<Operator> terms) {
  int dim = common_dim(terms, "ConvexCombination");
  if (weights.size() != terms.size()) {
    throw ValidationError("ConvexCombination: weights/terms size mismatch");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("ConvexCombination weights must be >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ValidationError("ConvexCombination weights must sum to 1");
  return Operator(std::make_shared<Node>(ops::ConvexCombination{std::move(weights), std::move(terms)}),
                  dim);
}

Operator Operator::douglas_rachford(ConvexSet a, ConvexSet b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("DouglasRachford: set dimensions disagree");
  int dim = a.dim();
  return Operator(std::make_shared<Node>(ops::DouglasRachford{std::move(a), std::move(b)}), dim);
}

Operator Operator::scalar_piecewise(std::vector<double> breakpoints,
                                    std::vector<ops::AffinePiece> pieces) {
  if (pieces.size() != breakpoints.size() + 1) {
    throw ValidationError("ScalarPiecewise needs one more piece than breakpoints");
  }
  for (size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i] < breakpoints[i + 1])) {
      throw ValidationError("ScalarPiecewise breakpoints must be strictly increasing");
    }
  }
  for (double b : breakpoints) {
    if (!std::isfinite(b)) throw ValidationError("ScalarPiecewise breakpoints must be finite");
  }
  for (const auto& p : pieces) {
    if (!std::isfinite(p.slope) || !std::isfinite(p.intercept)) {
      throw ValidationError("ScalarPiecewise pieces must be finite");
    }
    if (std::abs(p.slope) > 1.0 + 1e-12) {
      throw NotNonexpansive("ScalarPiecewise slopes must lie in [-1, 1]");
    }
  }
  for (size_t i = 0; i < breakpoints.size(); ++i) {
    const double b = breakpoints[i];
    const double left = pieces[i].slope * b + pieces[i].intercept;
    const double right = pieces[i + 1].slope * b + pieces[i + 1].intercept;
    if (std::abs(left - right) > 1e-12 * std::max({1.0, std::abs(left), std::abs(right)})) {
      throw ValidationError("ScalarPiecewise pieces must agree at breakpoints to 1e-12");
    }
  }
  return Operator(std::make_shared<Node>(ops::ScalarPiecewise{std::move(breakpoints), std::move(pieces)}),
                  1);
}

Operator Operator::limit(Operator inner, double tol, long max_iter) {
  if (!(tol > 0.0) || max_iter < 1) throw ValidationError("LimitOperator needs tol > 0, max_iter >= 1");
  int dim = inner.dim();
  auto ptr = std::make_shared<const Operator>(std::move(inner));
  return Operator(std::make_shared<Node>(ops::LimitOperator{std::move(ptr), tol, max_iter}), dim);
}

namespace {

double eval_piecewise(const ops::ScalarPiecewise& s, double x) {
  size_t i = 0;
  while (i < s.breakpoints.size() && x >= s.breakpoints[i]) ++i;
  return s.pieces[i].slope * x + s.pieces[i].intercept;
}

struct EvalVisitor {
  const Vector& x;

  Vector operator()(const ops::Identity&) const { return x; }
  Vector operator()(const ops::Constant& n) const { return n.value; }
  Vector operator()(const ops::Shift& n) const { return x + n.offset; }
  Vector operator()(const ops::LinearMatrix& n) const { return n.M * x; }
  Vector operator()(const ops::Affine& n) const { return n.M * x + n.offset; }
  Vector operator()(const ops::Projection& n) const { return n.set.project(x); }
  Vector operator()(const ops::Reflector& n) const { return 2.0 * n.set.project(x) - x; }
  Vector operator()(const ops::Prox& n) const { return n.f.prox(x, 1.0); }
  Vector operator()(const ops::Resolvent& n) const { return n.A.resolvent(x, n.alpha); }
  Vector operator()(const ops::ReflectedResolvent& n) const {
    return 2.0 * n.A.resolvent(x, 1.0) - x;
  }
  Vector operator()(const ops::Relaxation& n) const {
    if (n.lambda == 0.0) return x;
    return (1.0 - n.lambda) * x + n.lambda * (*n.inner)(x);
  }
  Vector operator()(const ops::Compose& n) const {
    Vector v = x;
    for (auto it = n.factors.rbegin(); it != n.factors.rend(); ++it) v = (*it)(v);
    return v;
  }
  Vector operator()(const ops::ConvexCombination& n) const {
    Vector v = Vector::Zero(x.size());
    for (size_t i = 0; i < n.terms.size(); ++i) v += n.weights[i] * n.terms[i](x);
    return v;
  }
  Vector operator()(const ops::DouglasRachford& n) const {
    Vector pa = n.a.project(x);
    return x - pa + n.b.project(2.0 * pa - x);
  }
  Vector operator()(const ops::ScalarPiecewise& n) const {
    Vector r(1);
    r(0) = eval_piecewise(n, x(0));
    return r;
  }
  Vector operator()(const ops::LimitOperator& n) const {
    Vector cur = x;
    for (long i = 0; i <= n.max_iter; ++i) {
      Vector next = (*n.inner)(cur);
      if ((next - cur).norm() <= n.tol) return cur;
      cur = next;
    }
    throw NonConvergence("LimitOperator: orbit did not settle within " +
                         std::to_string(n.max_iter) + " iterations");
  }
};

}  // namespace

Vector Operator::operator()(const Vector& x) const {
  require_dim(x, dim_, "Operator::operator()");
  return std::visit(EvalVisitor{x}, *node_);
}

// --- structural analysis -------------------------------------------------

AffineMap affine_compose(const AffineMap& outer, const AffineMap& inner) {
  return AffineMap{outer.M * inner.M, outer.M * inner.b + outer.b};
}

std::optional<AffineMap> projection_affine(const ConvexSet& set) {
  const int n = set.dim();
  if (const auto* s = std::get_if<sets::LinearSubspace>(&set.node())) {
    Matrix P = s->basis.cols() == 0 ? Matrix::Zero(n, n).eval()
                                    : (s->basis * s->basis.transpose()).eval();
    return AffineMap{std::move(P), Vector::Zero(n)};
  }
  if (const auto* s = std::get_if<sets::AffineSubspace>(&set.node())) {
    Matrix P = s->basis.cols() == 0 ? Matrix::Zero(n, n).eval()
                                    : (s->basis * s->basis.transpose()).eval();
    Vector b = s->anchor - P * s->anchor;
    return AffineMap{std::move(P), std::move(b)};
  }
  if (const auto* s = std::get_if<sets::Singleton>(&set.node())) {
    return AffineMap{Matrix::Zero(n, n), s->point};
  }
  return std::nullopt;
}

std::optional<AffineMap> prox_affine(const ConvexFunction& f, double scale) {
  const int n = f.dim();
  const auto& node = f.node();
  if (const auto* v = std::get_if<funcs::Indicator>(&node)) return projection_affine(v->set);
  if (const auto* v = std::get_if<funcs::Quadratic>(&node)) {
    Matrix A = scale * v->Q;
    A.diagonal().array() += 1.0;
    Matrix Minv = A.ldlt().solve(Matrix::Identity(n, n));
    return AffineMap{std::move(Minv), Vector::Zero(n)};
  }
  if (const auto* v = std::get_if<funcs::HalfDistanceSquared>(&node)) {
    auto p = projection_affine(v->set);
    if (!p) return std::nullopt;
    const double g = scale * v->alpha;
    return AffineMap{(Matrix::Identity(n, n) + g * p->M) / (1.0 + g), (g / (1.0 + g)) * p->b};
  }
  if (const auto* v = std::get_if<funcs::Support>(&node)) {
    if (!v->set.is_singleton()) return std::nullopt;
    const double g = scale * v->lambda;
    Vector c = v->set.project(Vector::Zero(n));
    return AffineMap{Matrix::Identity(n, n), -g * c};
  }
  if (const auto* v = std::get_if<funcs::MoreauEnvelope>(&node)) {
    const double g = scale * v->alpha;
    auto p = prox_affine(*v->inner, v->mu + g);
    if (!p) return std::nullopt;
    const double w = g / (v->mu + g);
    return AffineMap{(1.0 - w) * Matrix::Identity(n, n) + w * p->M, w * p->b};
  }
  if (const auto* v = std::get_if<funcs::ScalarPiecewiseConvex>(&node)) {
    if (v->slopes.front() != v->slopes.back()) return std::nullopt;
    Matrix M = Matrix::Identity(1, 1);
    Vector b(1);
    b(0) = -scale * v->slopes.front();
    return AffineMap{std::move(M), std::move(b)};
  }
  return std::nullopt;
}

std::optional<AffineMap> resolvent_affine(const MonotoneOperator& A, double alpha) {
  const int n = A.dim();
  if (alpha == 0.0) return AffineMap{Matrix::Identity(n, n), Vector::Zero(n)};
  const auto& node = A.node();
  if (const auto* v = std::get_if<monos::Subdifferential>(&node)) return prox_affine(v->f, alpha);
  if (const auto* v = std::get_if<monos::LinearMonotone>(&node)) {
    Matrix B = alpha * v->M;
    B.diagonal().array() += 1.0;
    Matrix Minv = B.partialPivLu().solve(Matrix::Identity(n, n));
    return AffineMap{std::move(Minv), Vector::Zero(n)};
  }
  if (const auto* v = std::get_if<monos::NormalCone>(&node)) return projection_affine(v->set);
  if (const auto* v = std::get_if<monos::Scaled>(&node)) {
    return resolvent_affine(*v->inner, alpha * v->alpha);
  }
  if (const auto* v = std::get_if<monos::Yosida>(&node)) {
    auto p = resolvent_affine(*v->inner, v->mu + alpha);
    if (!p) return std::nullopt;
    const double w = alpha / (v->mu + alpha);
    return AffineMap{(1.0 - w) * Matrix::Identity(n, n) + w * p->M, w * p->b};
  }
  return std::nullopt;
}

namespace {

struct AffineVisitor {
  int n;

  std::optional<AffineMap> operator()(const ops::Identity&) const {
    return AffineMap{Matrix::Identity(n, n), Vector::Zero(n)};
  }
  std::optional<AffineMap> operator()(const ops::Constant& v) const {
    return AffineMap{Matrix::Zero(n, n), v.value};
  }
  std::optional<AffineMap> operator()(const ops::Shift& v) const {
    return AffineMap{Matrix::Identity(n, n), v.offset};
  }
  std::optional<AffineMap> operator()(const ops::LinearMatrix& v) const {
    return AffineMap{v.M, Vector::Zero(n)};
  }
  std::optional<AffineMap> operator()(const ops::Affine& v) const { return AffineMap{v.M, v.offset}; }
  std::optional<AffineMap> operator()(const ops::Projection& v) const {
    return projection_affine(v.set);
  }
  std::optional<AffineMap> operator()(const ops::Reflector& v) const {
    auto p = projection_affine(v.set);
    if (!p) return std::nullopt;
    return AffineMap{2.0 * p->M - Matrix::Identity(n, n), 2.0 * p->b};
  }
  std::optional<AffineMap> operator()(const ops::Prox& v) const { return prox_affine(v.f, 1.0); }
  std::optional<AffineMap> operator()(const ops::Resolvent& v) const {
    return resolvent_affine(v.A, v.alpha);
  }
  std::optional<AffineMap> operator()(const ops::ReflectedResolvent& v) const {
    auto p = resolvent_affine(v.A, 1.0);
    if (!p) return std::nullopt;
    return AffineMap{2.0 * p->M - Matrix::Identity(n, n), 2.0 * p->b};
  }
  std::optional<AffineMap> operator()(const ops::Relaxation& v) const {
    auto p = try_affine(*v.inner);
    if (!p) return std::nullopt;
    return AffineMap{(1.0 - v.lambda) * Matrix::Identity(n, n) + v.lambda * p->M, v.lambda * p->b};
  }
  std::optional<AffineMap> operator()(const ops::Compose& v) const {
    AffineMap acc{Matrix::Identity(n, n), Vector::Zero(n)};
    for (auto it = v.factors.rbegin(); it != v.factors.rend(); ++it) {
      auto p = try_affine(*it);
      if (!p) return std::nullopt;
      acc = affine_compose(*p, acc);
    }
    return acc;
  }
  std::optional<AffineMap> operator()(const ops::ConvexCombination& v) const {
    AffineMap acc{Matrix::Zero(n, n), Vector::Zero(n)};
    for (size_t i = 0; i < v.terms.size(); ++i) {
      auto p = try_affine(v.terms[i]);
      if (!p) return std::nullopt;
      acc.M += v.weights[i] * p->M;
      acc.b += v.weights[i] * p->b;
    }
    return acc;
  }
  std::optional<AffineMap> operator()(const ops::DouglasRachford& v) const {
    auto pa = projection_affine(v.a);
    auto pb = projection_affine(v.b);
    if (!pa || !pb) return std::nullopt;
    AffineMap refl{2.0 * pa->M - Matrix::Identity(n, n), 2.0 * pa->b};
    AffineMap outer = affine_compose(*pb, refl);
    return AffineMap{Matrix::Identity(n, n) - pa->M + outer.M, outer.b - pa->b};
  }
  std::optional<AffineMap> operator()(const ops::ScalarPiecewise& v) const {
    if (v.pieces.size() != 1) return std::nullopt;
    Matrix M(1, 1);
    M(0, 0) = v.pieces[0].slope;
    Vector b(1);
    b(0) = v.pieces[0].intercept;
    return AffineMap{std::move(M), std::move(b)};
  }
  std::optional<AffineMap> operator()(const ops::LimitOperator&) const { return std::nullopt; }
};

bool matrix_invertible(const Matrix& M) {
  Eigen::JacobiSVD<Matrix> svd(M);
  const auto& sv = svd.singularValues();
  return sv(sv.size() - 1) > 1e-10 * std::max(1.0, sv(0));
}

struct BijectivityVisitor {
  std::optional<double> prox_modulus_upper(const ConvexFunction& f) const {
    return f.lipschitz_smooth() ? std::optional<double>(0.0) : std::nullopt;
  }

  BijectivityFlags operator()(const ops::Identity&) const { return {Tri::yes, Tri::yes}; }
  BijectivityFlags operator()(const ops::Constant&) const { return {Tri::no, Tri::no}; }
  BijectivityFlags operator()(const ops::Shift&) const { return {Tri::yes, Tri::yes}; }
  BijectivityFlags operator()(const ops::LinearMatrix& v) const {
    return matrix_invertible(v.M) ? BijectivityFlags{Tri::yes, Tri::yes}
                                  : BijectivityFlags{Tri::no, Tri::no};
  }
  BijectivityFlags operator()(const ops::Affine& v) const {
    return matrix_invertible(v.M) ? BijectivityFlags{Tri::yes, Tri::yes}
                                  : BijectivityFlags{Tri::no, Tri::no};
  }
  BijectivityFlags operator()(const ops::Projection&) const {
    // every catalog set is a proper subset, so P_C is neither
    return {Tri::no, Tri::no};
  }
  BijectivityFlags operator()(const ops::Reflector& v) const {
    if (std::holds_alternative<sets::LinearSubspace>(v.set.node()) ||
        std::holds_alternative<sets::AffineSubspace>(v.set.node()) ||
        std::holds_alternative<sets::Singleton>(v.set.node())) {
      return {Tri::yes, Tri::yes};  // isometry or point reflection
    }
    if (std::holds_alternative<sets::Box>(v.set.node()) ||
        std::holds_alternative<sets::Ball>(v.set.node()) ||
        std::holds_alternative<sets::Halfspace>(v.set.node())) {
      if (v.set.is_singleton()) return {Tri::yes, Tri::yes};
      return {Tri::no, Tri::no};  // reflection through a set with interior collides
    }
    return {Tri::unknown, Tri::unknown};
  }
  BijectivityFlags operator()(const ops::Prox& v) const {
    if (v.f.lipschitz_smooth()) return {Tri::yes, Tri::yes};
    const auto& node = v.f.node();
    if (std::holds_alternative<funcs::Indicator>(node)) return {Tri::no, Tri::no};
    if (const auto* s = std::get_if<funcs::Support>(&node)) {
      return s->set.is_singleton() ? BijectivityFlags{Tri::yes, Tri::yes}
                                   : BijectivityFlags{Tri::no, Tri::unknown};
    }
    if (std::holds_alternative<funcs::ScalarPiecewiseConvex>(node)) {
      return {Tri::no, Tri::yes};  // a slope jump flattens the prox on an interval
    }
    return {Tri::unknown, Tri::unknown};
  }
  BijectivityFlags operator()(const ops::Resolvent& v) const {
    if (v.alpha == 0.0) return {Tri::yes, Tri::yes};
    const auto& node = v.A.node();
    if (std::holds_alternative<monos::LinearMonotone>(node)) return {Tri::yes, Tri::yes};
    if (std::holds_alternative<monos::Yosida>(node)) return {Tri::yes, Tri::yes};
    if (const auto* s = std::get_if<monos::NormalCone>(&node)) {
      (void)s;
      return {Tri::no, Tri::no};
    }
    if (const auto* s = std::get_if<monos::Subdifferential>(&node)) {
      return (*this)(ops::Prox{s->f});
    }
    if (const auto* s = std::get_if<monos::Scaled>(&node)) {
      return (*this)(ops::Resolvent{*s->inner, v.alpha * s->alpha});
    }
    return {Tri::unknown, Tri::unknown};
  }
  BijectivityFlags operator()(const ops::ReflectedResolvent&) const {
    return {Tri::unknown, Tri::unknown};
  }
  BijectivityFlags operator()(const ops::Relaxation& v) const {
    if (v.lambda == 0.0) return {Tri::yes, Tri::yes};
    if (v.lambda == 1.0) return bijectivity(*v.inner);
    // k((1-l) Id + l T) <= l, so l < 1/2 forces a bi-Lipschitz bijection
    if (v.lambda < 0.5) return {Tri::yes, Tri::yes};
    return {Tri::unknown, Tri::unknown};
  }
  BijectivityFlags operator()(const ops::Compose& v) const {
    Tri inj = Tri::yes, sur = Tri::yes;
    for (const auto& f : v.factors) {
      auto fl = bijectivity(f);
      if (fl.injective != Tri::yes) inj = Tri::unknown;
      if (fl.surjective != Tri::yes) sur = Tri::unknown;
    }
    return {inj, sur};
  }
  BijectivityFlags operator()(const ops::ConvexCombination&) const {
    return {Tri::unknown, Tri::unknown};
  }
  BijectivityFlags operator()(const ops::DouglasRachford&) const {
    return {Tri::unknown, Tri::unknown};
  }
  BijectivityFlags operator()(const ops::ScalarPiecewise& v) const {
    bool all_pos = true, all_neg = true;
    for (const auto& p : v.pieces) {
      if (p.slope <= 0.0) all_pos = false;
      if (p.slope >= 0.0) all_neg = false;
    }
    const double s0 = v.pieces.front().slope;
    const double s1 = v.pieces.back().slope;
    Tri inj = (all_pos || all_neg) ? Tri::yes : Tri::no;
    const bool sup_inf = (s1 > 0.0) || (s0 < 0.0);
    const bool inf_inf = (s0 > 0.0) || (s1 < 0.0);
    Tri sur = (sup_inf && inf_inf) ? Tri::yes : Tri::no;
    return {inj, sur};
  }
  BijectivityFlags operator()(const ops::LimitOperator&) const {
    return {Tri::unknown, Tri::unknown};
  }
};

}  // namespace

std::optional<AffineMap> try_affine(const Operator& T) {
  return std::visit(AffineVisitor{T.dim()}, T.node());
}

BijectivityFlags bijectivity(const Operator& T) { return std::visit(BijectivityVisitor{}, T.node()); }

bool is_constant_map(const Operator& T) {
  const auto& node = T.node();
  if (std::holds_alternative<ops::Constant>(node)) return true;
  if (const auto* v = std::get_if<ops::Projection>(&node)) return v->set.is_singleton();
  if (const auto* v = std::get_if<ops::Prox>(&node)) {
    if (const auto* ind = std::get_if<funcs::Indicator>(&v->f.node())) return ind->set.is_singleton();
    return false;
  }
  if (const auto* v = std::get_if<ops::Resolvent>(&node)) {
    if (v->alpha == 0.0) return false;
    if (const auto* nc = std::get_if<monos::NormalCone>(&v->A.node())) return nc->set.is_singleton();
    return false;
  }
  if (const auto* v = std::get_if<ops::Compose>(&node)) {
    for (const auto& f : v->factors) {
      if (is_constant_map(f)) return true;
    }
    return false;
  }
  if (const auto* v = std::get_if<ops::ConvexCombination>(&node)) {
    for (const auto& t : v->terms) {
      if (!is_constant_map(t)) return false;
    }
    return true;
  }
  if (const auto* v = std::get_if<ops::ScalarPiecewise>(&node)) {
    for (const auto& p : v->pieces) {
      if (p.slope != 0.0) return false;
    }
    return true;
  }
  return false;
}

}  // namespace averop
