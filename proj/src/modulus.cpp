#include "averop/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace averop {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

constexpr double kPsdThreshold = -1e-11;
constexpr double kBisectTol = 1e-12;
constexpr double kRankCutoff = 1e-10;

Matrix orthonormal_columns(const Matrix& A, double cutoff) {
  if (A.cols() == 0) return A;
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > cutoff) ++r;
  return svd.matrixU().leftCols(r);
}

}  // namespace

ModulusBound ModulusBound::exactly(double k, TraceStep step) {
  ModulusBound b;
  b.lower = b.upper = k;
  b.exact = true;
  b.trace.push_back(std::move(step));
  return b;
}

ModulusBound& ModulusBound::then(TraceStep step) {
  trace.insert(trace.begin(), std::move(step));
  return *this;
}

double matrix_modulus(const Matrix& M) {
  const double nrm = certified_spectral_norm(M);
  if (nrm > 1.0 + 1e-9) {
    throw NotNonexpansive("matrix_modulus: spectral norm " + std::to_string(nrm) + " exceeds 1");
  }
  const Eigen::Index n = M.rows();
  const Matrix S = M + M.transpose();
  const Matrix G = M.transpose() * M;
  const Matrix I = Matrix::Identity(n, n);
  auto feasible = [&](double k) {
    Matrix Q = (1.0 - k) * S - G - (1.0 - 2.0 * k) * I;
    Eigen::SelfAdjointEigenSolver<Matrix> es(Q, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0) >= kPsdThreshold;
  };
  if (feasible(0.0)) return 0.0;
  // the quadratic form is monotone in k and k = 1 is admissible for any
  // certified nonexpansive matrix
  double lo = 0.0, hi = 1.0;
  while (hi - lo > kBisectTol) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

double scalar_modulus(const ops::ScalarPiecewise& g) {
  double m = g.pieces.front().slope;
  for (const auto& p : g.pieces) m = std::min(m, p.slope);
  if (std::abs(m) > 1.0 + 1e-12) throw NotNonexpansive("scalar_modulus: slope outside [-1, 1]");
  return (1.0 - m) / 2.0;
}

double scalar_modulus(const Operator& T) {
  const auto* g = std::get_if<ops::ScalarPiecewise>(&T.node());
  if (!g) throw ValidationError("scalar_modulus expects a ScalarPiecewise operator");
  return scalar_modulus(*g);
}

double prox_modulus(const ConvexFunction& f, double scale) {
  struct V {
    double s;
    double operator()(const funcs::Indicator&) const { return 0.5; }
    double operator()(const funcs::Quadratic& q) const {
      Eigen::SelfAdjointEigenSolver<Matrix> es(q.Q, Eigen::EigenvaluesOnly);
      const double g = s * std::max(0.0, es.eigenvalues()(es.eigenvalues().size() - 1));
      return g == 0.0 ? 0.0 : 0.5 * (g / (1.0 + g));
    }
    double operator()(const funcs::HalfDistanceSquared& h) const {
      const double g = s * h.alpha;
      return 0.5 * (g / (1.0 + g));
    }
    double operator()(const funcs::Huber& h) const {
      const double g = s * h.alpha;
      return 0.5 * (g / (h.mu + g));
    }
    double operator()(const funcs::Support& sp) const { return sp.set.is_singleton() ? 0.0 : 0.5; }
    double operator()(const funcs::MoreauEnvelope& m) const {
      const double g = s * m.alpha;
      return (g / (m.mu + g)) * prox_modulus(*m.inner, m.mu + g);
    }
    double operator()(const funcs::ScalarPiecewiseConvex& p) const {
      return p.slopes.front() == p.slopes.back() ? 0.0 : 0.5;
    }
  };
  if (!(scale > 0.0)) throw ValidationError("prox_modulus needs scale > 0");
  return std::visit(V{scale}, f.node());
}

double resolvent_modulus(const MonotoneOperator& A, double alpha) {
  if (alpha == 0.0) return 0.0;
  struct V {
    double a;
    double operator()(const monos::Subdifferential& m) const { return prox_modulus(m.f, a); }
    double operator()(const monos::LinearMonotone& m) const {
      const double c = linear_cocoercive_value(m.M);
      if (c == kInf) return 0.0;
      return 0.5 * (a / (a + c));
    }
    double operator()(const monos::NormalCone&) const { return 0.5; }
    double operator()(const monos::Scaled& m) const { return resolvent_modulus(*m.inner, a * m.alpha); }
    double operator()(const monos::Yosida& m) const {
      return (a / (m.mu + a)) * resolvent_modulus(*m.inner, m.mu + a);
    }
  };
  if (!(alpha > 0.0)) throw ValidationError("resolvent_modulus needs alpha >= 0");
  return std::visit(V{alpha}, A.node());
}

double friedrichs_cosine(const Matrix& Bu, const Matrix& Bv) {
  if (Bu.rows() != Bv.rows()) throw DimensionMismatch("friedrichs_cosine: ambient dimensions disagree");
  const Eigen::Index p = Bu.cols(), q = Bv.cols();
  if (p == 0 || q == 0) return 0.0;

  // intersection directions are the null space of the stacked basis
  Matrix stacked(Bu.rows(), p + q);
  stacked << Bu, -Bv;
  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  std::vector<Eigen::Index> null_cols;
  for (Eigen::Index j = 0; j < p + q; ++j) {
    const double s = j < sv.size() ? sv(j) : 0.0;
    if (s <= kRankCutoff) null_cols.push_back(j);
  }
  Matrix W(Bu.rows(), static_cast<Eigen::Index>(null_cols.size()));
  for (size_t i = 0; i < null_cols.size(); ++i) {
    W.col(static_cast<Eigen::Index>(i)) = Bu * svd.matrixV().col(null_cols[i]).head(p);
  }
  W = orthonormal_columns(W, kRankCutoff);

  Matrix Du = Bu, Dv = Bv;
  if (W.cols() > 0) {
    Du -= W * (W.transpose() * Bu);
    Dv -= W * (W.transpose() * Bv);
  }
  Matrix BuD = orthonormal_columns(Du, kRankCutoff);
  Matrix BvD = orthonormal_columns(Dv, kRankCutoff);
  if (BuD.cols() == 0 || BvD.cols() == 0) return 0.0;

  Eigen::JacobiSVD<Matrix> cross(BuD.transpose() * BvD);
  return std::clamp(cross.singularValues()(0), 0.0, 1.0);
}

SubspacePair SubspacePair::make(const ConvexSet& U, const ConvexSet& V) {
  const auto* su = std::get_if<sets::LinearSubspace>(&U.node());
  const auto* sv = std::get_if<sets::LinearSubspace>(&V.node());
  if (!su || !sv) throw ValidationError("SubspacePair needs two LinearSubspace sets");
  if (U.dim() != V.dim()) throw DimensionMismatch("SubspacePair: ambient dimensions disagree");
  if (su->basis.cols() == 0 || sv->basis.cols() == 0) {
    throw ValidationError("SubspacePair needs nonzero subspaces");
  }
  if (su->basis.cols() == sv->basis.cols()) {
    Matrix Pu = su->basis * su->basis.transpose();
    Matrix Pv = sv->basis * sv->basis.transpose();
    if ((Pu - Pv).cwiseAbs().maxCoeff() <= 1e-10) {
      throw DegeneratePair("SubspacePair: subspaces coincide; P_V P_U is the projection itself");
    }
  }
  double c = averop::friedrichs_cosine(su->basis, sv->basis);
  return SubspacePair(su->basis, sv->basis, c);
}

double two_subspace_modulus(const SubspacePair& pair) {
  const double c = pair.friedrichs_cosine();
  return (1.0 + c) / (2.0 + c);
}

// --- exact rule engine ----------------------------------------------------

namespace {

bool matrix_is_identity(const Matrix& M) {
  return (M - Matrix::Identity(M.rows(), M.cols())).cwiseAbs().maxCoeff() <= 1e-14;
}

bool matrix_is_orthogonal(const Matrix& M) {
  Matrix G = M.transpose() * M;
  G.diagonal().array() -= 1.0;
  return G.cwiseAbs().maxCoeff() <= 1e-12;
}

// Exact modulus of a (certified nonexpansive) matrix with a readable trace.
ModulusBound matrix_bound(const Matrix& M) {
  if (matrix_is_identity(M)) {
    return ModulusBound::exactly(0.0, {"identity_zero", "M equals the identity"});
  }
  if (matrix_is_orthogonal(M)) {
    return ModulusBound::exactly(1.0, {"orthogonal_isometry", "orthogonal matrix distinct from Id"});
  }
  const double k = matrix_modulus(M);
  return ModulusBound::exactly(k, {"matrix_modulus", "bisection on the averagedness quadratic form"});
}

// Ogura-Yamada composition expression.
double oy(double a, double b) {
  if (a * b >= 1.0) return 1.0;
  return std::clamp((a + b - 2.0 * a * b) / (1.0 - a * b), 0.0, 1.0);
}

bool is_shift_like(const Operator& T) {
  return std::holds_alternative<ops::Identity>(T.node()) ||
         std::holds_alternative<ops::Shift>(T.node());
}

struct ModulusVisitor {
  const Operator& T;

  ModulusBound operator()(const ops::Identity&) const {
    return ModulusBound::exactly(0.0, {"identity_zero", ""});
  }
  ModulusBound operator()(const ops::Shift&) const {
    return ModulusBound::exactly(0.0, {"shift_zero", "translations are 0-averaged"});
  }
  ModulusBound operator()(const ops::Constant&) const {
    return ModulusBound::exactly(0.5, {"constant_half", ""});
  }
  ModulusBound operator()(const ops::LinearMatrix& n) const { return matrix_bound(n.M); }
  ModulusBound operator()(const ops::Affine& n) const {
    return matrix_bound(n.M).then({"shift_invariance", "translation dropped"});
  }
  ModulusBound operator()(const ops::Projection&) const {
    return ModulusBound::exactly(
        0.5, {"projection_special_half", "every catalog set is a proper subset"});
  }
  ModulusBound operator()(const ops::Reflector&) const {
    return ModulusBound::exactly(1.0, {"reflector_one", "reflector through a proper set"});
  }
  ModulusBound operator()(const ops::Prox& n) const {
    const double l = n.f.gradient_lipschitz();
    if (l == kInf) {
      return ModulusBound::exactly(
          0.5, {"prox_nonsmooth_half", "function is not Lipschitz smooth"});
    }
    const double k = prox_modulus(n.f, 1.0);
    return ModulusBound::exactly(
        k, {"prox_smooth", "gradient Lipschitz value " + num(l)});
  }
  ModulusBound operator()(const ops::Resolvent& n) const {
    if (n.alpha == 0.0) {
      return ModulusBound::exactly(0.0, {"identity_zero", "zero resolvent scale"});
    }
    const double k = resolvent_modulus(n.A, n.alpha);
    return ModulusBound::exactly(
        k, {"resolvent_cocoercive", "k(J_aA) = a / (2(a + c(A))), a = " + num(n.alpha)});
  }
  ModulusBound operator()(const ops::ReflectedResolvent& n) const {
    const double k = resolvent_modulus(n.A, 1.0);
    return ModulusBound::exactly(
        2.0 * k, {"reflected_resolvent_double", "k(R_A) = 2 k(J_A), k(J_A) = " + num(k)});
  }
  ModulusBound operator()(const ops::Relaxation& n) const {
    if (n.lambda == 0.0) {
      return ModulusBound::exactly(0.0, {"relaxation_linearity", "lambda = 0"});
    }
    ModulusBound inner = exact_modulus(*n.inner);
    ModulusBound out;
    out.lower = n.lambda * inner.lower;
    out.upper = n.lambda * inner.upper;
    out.exact = inner.exact;
    out.trace = std::move(inner.trace);
    out.then({"relaxation_linearity", "k((1-l)Id + lT) = l k(T), l = " + num(n.lambda)});
    return out;
  }
  ModulusBound operator()(const ops::Compose& n) const { return compose_bound(n); }
  ModulusBound operator()(const ops::ConvexCombination& n) const { return combination_bound(n); }
  ModulusBound operator()(const ops::DouglasRachford& n) const {
    const auto* su = std::get_if<sets::LinearSubspace>(&n.a.node());
    const auto* sv = std::get_if<sets::LinearSubspace>(&n.b.node());
    if (su && sv) {
      if (su->basis.cols() == sv->basis.cols()) {
        Matrix Pu = su->basis * su->basis.transpose();
        Matrix Pv = sv->basis * sv->basis.transpose();
        if ((Pu - Pv).cwiseAbs().maxCoeff() <= 1e-10) {
          return ModulusBound::exactly(
              0.0, {"identity_zero", "Douglas-Rachford of a subspace with itself is Id"});
        }
      }
      return ModulusBound::exactly(
          0.5, {"dr_two_subspaces_half", "(Id + R_U R_V)/2 over distinct subspaces"});
    }
    if (auto aff = try_affine(T)) {
      return matrix_bound(aff->M).then({"affine_collapse", "tree evaluates to an affine map"});
    }
    ModulusBound out;
    out.lower = 0.0;
    out.upper = 0.5;
    out.trace.push_back({"firmly_nonexpansive_upper", "Douglas-Rachford maps are firmly nonexpansive"});
    return out;
  }
  ModulusBound operator()(const ops::ScalarPiecewise& n) const {
    return ModulusBound::exactly(
        scalar_modulus(n), {"scalar_modulus", "k = (1 - min slope)/2 on the real line"});
  }
  ModulusBound operator()(const ops::LimitOperator& n) const { return limit_bound(n); }

 private:
  ModulusBound compose_bound(const ops::Compose& n) const {
    if (is_constant_map(T)) {
      return ModulusBound::exactly(0.5, {"constant_half", "composition collapses to a constant"});
    }

    // translations do not change the modulus on either side
    std::vector<Operator> kept;
    bool stripped = false;
    for (const auto& f : n.factors) {
      if (is_shift_like(f)) {
        stripped = true;
      } else {
        kept.push_back(f);
      }
    }
    if (kept.empty()) {
      return ModulusBound::exactly(0.0, {"shift_zero", "composition of translations"});
    }
    if (kept.size() == 1) {
      ModulusBound inner = exact_modulus(kept.front());
      if (stripped) inner.then({"shift_invariance", "translation factors dropped"});
      return inner;
    }

    if (kept.size() == 2) {
      const auto* pv = std::get_if<ops::Projection>(&kept[0].node());
      const auto* pu = std::get_if<ops::Projection>(&kept[1].node());
      if (pv && pu && std::holds_alternative<sets::LinearSubspace>(pv->set.node()) &&
          std::holds_alternative<sets::LinearSubspace>(pu->set.node())) {
        const auto& bu = std::get<sets::LinearSubspace>(pu->set.node()).basis;
        const auto& bv = std::get<sets::LinearSubspace>(pv->set.node()).basis;
        if (bu.cols() > 0 && bv.cols() > 0) {
          try {
            SubspacePair pair = SubspacePair::make(pu->set, pv->set);
            const double k = two_subspace_modulus(pair);
            ModulusBound out = ModulusBound::exactly(
                k, {"two_subspace_modulus",
                    "Friedrichs cosine " + num(pair.friedrichs_cosine())});
            if (stripped) out.then({"shift_invariance", "translation factors dropped"});
            return out;
          } catch (const DegeneratePair&) {
            return ModulusBound::exactly(
                0.5, {"projection_special_half", "P_V P_U = P_U for coinciding subspaces"});
          }
        }
      }
    }

    if (auto aff = try_affine(T)) {
      return matrix_bound(aff->M).then({"affine_collapse", "tree evaluates to an affine map"});
    }

    // interval: Ogura-Yamada upper bound, non-bijectivity lower bound
    std::vector<ModulusBound> parts;
    parts.reserve(kept.size());
    for (const auto& f : kept) parts.push_back(exact_modulus(f));

    ModulusBound out;
    double upper = parts.front().upper;
    for (size_t i = 1; i < parts.size(); ++i) upper = oy(upper, parts[i].upper);
    out.upper = upper;
    out.trace.push_back({"composition_upper", "Ogura-Yamada fold over factor bounds"});

    std::vector<BijectivityFlags> flags;
    flags.reserve(kept.size());
    for (const auto& f : kept) flags.push_back(bijectivity(f));
    bool nonbij = false;
    // a non-surjective factor below a bijective prefix, or a non-injective
    // factor above a bijective suffix, makes the composition non-bijective
    for (size_t i = 0; i < kept.size() && !nonbij; ++i) {
      bool prefix_bij = true;
      for (size_t j = 0; j < i; ++j) {
        prefix_bij = prefix_bij && flags[j].injective == Tri::yes && flags[j].surjective == Tri::yes;
      }
      if (prefix_bij && flags[i].surjective == Tri::no) nonbij = true;
    }
    for (size_t i = 0; i < kept.size() && !nonbij; ++i) {
      bool suffix_bij = true;
      for (size_t j = i + 1; j < kept.size(); ++j) {
        suffix_bij = suffix_bij && flags[j].injective == Tri::yes && flags[j].surjective == Tri::yes;
      }
      if (suffix_bij && flags[i].injective == Tri::no) nonbij = true;
    }
    if (nonbij) {
      out.lower = 0.5;
      out.trace.push_back({"non_bijective_lower_half", "composition cannot be bijective"});
    }
    out.lower = std::min(out.lower, out.upper);
    return out;
  }

  ModulusBound combination_bound(const ops::ConvexCombination& n) const {
    if (n.terms.size() == 1) return exact_modulus(n.terms.front());

    size_t nontrivial = 0;
    size_t idx = 0;
    for (size_t i = 0; i < n.terms.size(); ++i) {
      if (!is_shift_like(n.terms[i])) {
        ++nontrivial;
        idx = i;
      }
    }
    if (nontrivial == 0) {
      return ModulusBound::exactly(0.0, {"shift_zero", "convex combination of translations"});
    }
    if (nontrivial == 1) {
      ModulusBound inner = exact_modulus(n.terms[idx]);
      const double w = n.weights[idx];
      ModulusBound out;
      out.lower = w * inner.lower;
      out.upper = w * inner.upper;
      out.exact = inner.exact;
      out.trace = std::move(inner.trace);
      out.then({"relaxation_linearity",
                "identity-plus-translation terms act as (1-l)Id, l = " + num(w)});
      return out;
    }

    if (auto aff = try_affine(T)) {
      return matrix_bound(aff->M).then({"affine_collapse", "tree evaluates to an affine map"});
    }

    ModulusBound out;
    double upper = 0.0;
    for (size_t i = 0; i < n.terms.size(); ++i) {
      upper += n.weights[i] * exact_modulus(n.terms[i]).upper;
    }
    out.upper = std::min(1.0, upper);
    out.lower = 0.0;
    out.trace.push_back({"convexity_upper", "k is convex over nonexpansive maps"});
    return out;
  }

  ModulusBound limit_bound(const ops::LimitOperator& n) const {
    if (std::holds_alternative<ops::Identity>(n.inner->node())) {
      return ModulusBound::exactly(0.0, {"identity_zero", "limit of the identity"});
    }
    if (auto aff = try_affine(*n.inner)) {
      if (matrix_is_identity(aff->M)) {
        if (aff->b.cwiseAbs().maxCoeff() <= 1e-14) {
          return ModulusBound::exactly(0.0, {"identity_zero", "limit of the identity"});
        }
        ModulusBound out;
        out.trace.push_back(
            {"limit_undefined", "translation has no fixed point; limiting operator undefined"});
        return out;
      }
      const double km = matrix_modulus(aff->M);
      if (km >= 1.0 - 1e-12) {
        ModulusBound out;
        out.trace.push_back({"limit_undefined", "inner map is not averaged; orbits may not settle"});
        return out;
      }
      const Eigen::Index d = aff->M.rows();
      Matrix A = Matrix::Identity(d, d) - aff->M;
      Vector x = A.colPivHouseholderQr().solve(aff->b);
      if ((A * x - aff->b).norm() <= 1e-9 * (1.0 + aff->b.norm())) {
        return ModulusBound::exactly(
            0.5, {"limit_affine_projection_half",
                  "averaged affine maps settle on the projection onto their fixed set"});
      }
      ModulusBound out;
      out.trace.push_back({"limit_undefined", "inner affine map has no fixed point"});
      return out;
    }
    ModulusBound out;
    out.lower = 0.5;
    out.upper = 1.0;
    out.trace.push_back({"limit_idempotent_range",
                         "a nontrivial limiting operator is idempotent with proper range"});
    return out;
  }
};

}  // namespace

ModulusBound exact_modulus(const Operator& T) {
  if (is_constant_map(T)) {
    return ModulusBound::exactly(0.5, {"constant_half", ""});
  }
  return std::visit(ModulusVisitor{T}, T.node());
}

}  // namespace averop
