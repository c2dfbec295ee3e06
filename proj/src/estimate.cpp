#include "averop/estimate.hpp"

#include <algorithm>
#include <cmath>

#include "averop/modulus.hpp"
#include "averop/sampling.hpp"

namespace averop {

namespace {

constexpr double kScales[] = {0.1, 1.0, 10.0};
// Degeneracy threshold on the cocoercivity denominator, relative to
// ||Bx-By|| ||x-y||.
constexpr double kDegenerateDelta = 1e-12;
// The "nonpositive denominator means k = 1" rule only fires for a genuine
// expansion direction, so iterative-projector noise cannot trip it.
constexpr double kIsometryMinRatio = 1e-6;
// Pairs whose denominator cancels below this fraction of its natural scale
// carry only rounding noise; they are skipped and counted.
constexpr double kCancellationGuard = 1e-5;

const char* quantity_names[] = {"modulus", "cocoercive_value", "monotone_value",
                                "lipschitz_value"};
const char* direction_names[] = {"lower_bound", "upper_bound"};

void collect_set_pairs(const ConvexSet& set, std::vector<SamplePair>& out) {
  const int n = set.dim();
  auto push = [&](Vector x, Vector y) { out.push_back({std::move(x), std::move(y)}); };
  Vector e1 = Vector::Unit(n, 0);
  if (const auto* b = std::get_if<sets::Box>(&set.node())) {
    push(b->upper, b->upper + Vector::Ones(n));
    push(b->lower, b->lower - e1);
    return;
  }
  if (const auto* b = std::get_if<sets::Ball>(&set.node())) {
    Vector rim = b->center + b->radius * e1;
    push(rim, rim + e1);
    push(rim, rim + 10.0 * e1);
    return;
  }
  if (const auto* h = std::get_if<sets::Halfspace>(&set.node())) {
    Vector x0 = (h->h.offset / h->h.normal.squaredNorm()) * h->h.normal;
    push(x0, x0 - h->h.normal);
    push(x0, x0 - 10.0 * h->h.normal);
    return;
  }
  if (const auto* s = std::get_if<sets::LinearSubspace>(&set.node())) {
    Vector probe = Vector::Zero(n);
    // outward direction: the canonical axis farthest from the subspace
    Vector best = e1;
    double best_norm = -1.0;
    for (int i = 0; i < n; ++i) {
      Vector e = Vector::Unit(n, i);
      Vector res = s->basis.cols() == 0 ? e : (e - s->basis * (s->basis.transpose() * e)).eval();
      if (res.norm() > best_norm) {
        best_norm = res.norm();
        best = res;
      }
    }
    if (best.norm() > 0) {
      push(probe, best);
      push(probe, 10.0 * best);
    }
    return;
  }
  if (const auto* s = std::get_if<sets::AffineSubspace>(&set.node())) {
    Vector best = e1;
    double best_norm = -1.0;
    for (int i = 0; i < n; ++i) {
      Vector e = Vector::Unit(n, i);
      Vector res = s->basis.cols() == 0 ? e : (e - s->basis * (s->basis.transpose() * e)).eval();
      if (res.norm() > best_norm) {
        best_norm = res.norm();
        best = res;
      }
    }
    if (best.norm() > 0) push(s->anchor, s->anchor + best);
    return;
  }
  if (const auto* s = std::get_if<sets::Singleton>(&set.node())) {
    push(s->point, s->point + e1);
    return;
  }
  if (const auto* s = std::get_if<sets::HalfspaceIntersection>(&set.node())) {
    Vector feasible = set.project(Vector::Zero(n));
    for (const auto& part : s->parts) {
      push(feasible, feasible - part.normal);
    }
    return;
  }
}

void collect_matrix_pairs(const Matrix& M, std::vector<SamplePair>& out) {
  const Eigen::Index n = M.rows();
  Vector zero = Vector::Zero(n);
  auto push_dir = [&](const Vector& v) {
    if (!v.allFinite() || v.norm() == 0.0) return;
    Vector u = v / v.norm();
    for (double s : kScales) out.push_back({zero, s * u});
  };
  // eigen-directions of the symmetric part
  Matrix S = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  for (Eigen::Index i = 0; i < n; ++i) push_dir(es.eigenvectors().col(i));
  // extremal direction of the averagedness ratio for B = I - M: maximize
  // v'B'Bv / (v' (B + B') v) over the range of the symmetric part of B
  Matrix B = Matrix::Identity(n, n) - M;
  Matrix S2 = B + B.transpose();
  Matrix G = B.transpose() * B;
  Eigen::SelfAdjointEigenSolver<Matrix> es2(S2);
  const auto& d = es2.eigenvalues();
  double dmax = d.cwiseAbs().maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (d(i) > 1e-12 * std::max(1.0, dmax)) keep.push_back(i);
  }
  if (!keep.empty()) {
    Matrix V(n, static_cast<Eigen::Index>(keep.size()));
    Vector dh(static_cast<Eigen::Index>(keep.size()));
    for (size_t i = 0; i < keep.size(); ++i) {
      V.col(static_cast<Eigen::Index>(i)) = es2.eigenvectors().col(keep[i]);
      dh(static_cast<Eigen::Index>(i)) = 1.0 / std::sqrt(d(keep[i]));
    }
    Matrix R = dh.asDiagonal() * (V.transpose() * G * V) * dh.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Matrix> es3(R);
    Vector top = V * (dh.asDiagonal() * es3.eigenvectors().col(R.rows() - 1));
    push_dir(top);
  }
}

void collect_function_pairs(const ConvexFunction& f, std::vector<SamplePair>& out) {
  const int n = f.dim();
  if (const auto* v = std::get_if<funcs::Indicator>(&f.node())) {
    collect_set_pairs(v->set, out);
  } else if (const auto* v = std::get_if<funcs::Quadratic>(&f.node())) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(v->Q);
    Vector zero = Vector::Zero(n);
    for (Eigen::Index i = 0; i < v->Q.rows(); ++i) {
      for (double s : kScales) out.push_back({zero, s * es.eigenvectors().col(i)});
    }
  } else if (const auto* v = std::get_if<funcs::HalfDistanceSquared>(&f.node())) {
    collect_set_pairs(v->set, out);
  } else if (const auto* v = std::get_if<funcs::Huber>(&f.node())) {
    Vector e1 = Vector::Unit(n, 0);
    Vector zero = Vector::Zero(n);
    out.push_back({zero, 0.5 * v->mu * e1});
    out.push_back({zero, 2.0 * v->mu * e1});
    out.push_back({v->mu * e1, 3.0 * v->mu * e1});
  } else if (const auto* v = std::get_if<funcs::Support>(&f.node())) {
    collect_set_pairs(v->set, out);
  } else if (const auto* v = std::get_if<funcs::MoreauEnvelope>(&f.node())) {
    collect_function_pairs(*v->inner, out);
  } else if (const auto* v = std::get_if<funcs::ScalarPiecewiseConvex>(&f.node())) {
    for (double b : v->breakpoints) {
      Vector x(1), y(1);
      x << b - 0.5;
      y << b + 0.5;
      out.push_back({x, y});
    }
  }
}

void collect_monotone_pairs(const MonotoneOperator& A, std::vector<SamplePair>& out) {
  if (const auto* v = std::get_if<monos::Subdifferential>(&A.node())) {
    collect_function_pairs(v->f, out);
  } else if (const auto* v = std::get_if<monos::LinearMonotone>(&A.node())) {
    collect_matrix_pairs(v->M, out);
  } else if (const auto* v = std::get_if<monos::NormalCone>(&A.node())) {
    collect_set_pairs(v->set, out);
  } else if (const auto* v = std::get_if<monos::Scaled>(&A.node())) {
    collect_monotone_pairs(*v->inner, out);
  } else if (const auto* v = std::get_if<monos::Yosida>(&A.node())) {
    collect_monotone_pairs(*v->inner, out);
  }
}

void collect_pairs(const Operator& T, std::vector<SamplePair>& out) {
  if (auto aff = try_affine(T)) {
    collect_matrix_pairs(aff->M, out);
  }
  const auto& node = T.node();
  if (const auto* v = std::get_if<ops::Projection>(&node)) {
    collect_set_pairs(v->set, out);
  } else if (const auto* v = std::get_if<ops::Reflector>(&node)) {
    collect_set_pairs(v->set, out);
  } else if (const auto* v = std::get_if<ops::Prox>(&node)) {
    collect_function_pairs(v->f, out);
  } else if (const auto* v = std::get_if<ops::Resolvent>(&node)) {
    collect_monotone_pairs(v->A, out);
  } else if (const auto* v = std::get_if<ops::ReflectedResolvent>(&node)) {
    collect_monotone_pairs(v->A, out);
  } else if (const auto* v = std::get_if<ops::Relaxation>(&node)) {
    collect_pairs(*v->inner, out);
  } else if (const auto* v = std::get_if<ops::Compose>(&node)) {
    for (const auto& f : v->factors) collect_pairs(f, out);
  } else if (const auto* v = std::get_if<ops::ConvexCombination>(&node)) {
    for (const auto& t : v->terms) collect_pairs(t, out);
  } else if (const auto* v = std::get_if<ops::DouglasRachford>(&node)) {
    collect_set_pairs(v->a, out);
    collect_set_pairs(v->b, out);
  } else if (const auto* v = std::get_if<ops::ScalarPiecewise>(&node)) {
    const auto& bp = v->breakpoints;
    for (size_t i = 0; i < bp.size(); ++i) {
      Vector x(1), y(1);
      x << bp[i] - 0.5;
      y << bp[i] + 0.5;
      out.push_back({x, y});
      // pairs inside each piece, where the ratio equals the piece slope
      double lo = (i == 0) ? bp[i] - 10.0 : bp[i - 1];
      double mid = 0.5 * (lo + bp[i]);
      x << mid;
      y << 0.5 * (mid + bp[i]);
      out.push_back({x, y});
    }
    if (!bp.empty()) {
      Vector x(1), y(1);
      x << bp.back() + 1.0;
      y << bp.back() + 10.0;
      out.push_back({x, y});
    }
  } else if (const auto* v = std::get_if<ops::LimitOperator>(&node)) {
    collect_pairs(*v->inner, out);
  }
}

struct RatioResult {
  double q = 0.0;
  bool valid = false;
  bool isometry = false;  // nonpositive denominator with a genuine displacement
};

RatioResult modulus_ratio(const Operator& T, const Vector& x, const Vector& y) {
  RatioResult r;
  Vector dx = x - y;
  const double ndx = dx.norm();
  if (ndx == 0.0) return r;
  Vector bx = x - T(x);
  Vector by = y - T(y);
  Vector db = bx - by;
  const double ndb = db.norm();
  if (ndb <= kDegenerateDelta * ndx) return r;
  const double den = dx.dot(db);
  if (den <= 0.0) {
    if (ndb >= kIsometryMinRatio * ndx) r.isometry = true;
    return r;
  }
  if (den <= kDegenerateDelta * ndb * ndx) return r;
  if (den <= kCancellationGuard * ndx * (bx.norm() + by.norm())) return r;
  r.q = db.squaredNorm() / (2.0 * den);
  r.valid = true;
  return r;
}

void refine_witness(const Operator& T, Vector& x, Vector& y, double& best, int steps) {
  double h = 1.0 + std::max(x.cwiseAbs().maxCoeff(), y.cwiseAbs().maxCoeff());
  const int n = static_cast<int>(x.size());
  for (int step = 0; step < steps; ++step) {
    double best_gain = 0.0;
    int best_coord = -1, best_vec = 0;
    double best_sign = 1.0, best_val = best;
    for (int vec = 0; vec < 2; ++vec) {
      for (int i = 0; i < n; ++i) {
        for (double sgn : {1.0, -1.0}) {
          Vector cx = x, cy = y;
          (vec == 0 ? cx : cy)(i) += sgn * h;
          RatioResult r = modulus_ratio(T, cx, cy);
          if (r.valid && r.q > best_val + best_gain) {
            best_gain = r.q - best_val;
            best_coord = i;
            best_vec = vec;
            best_sign = sgn;
          }
        }
      }
    }
    if (best_coord >= 0) {
      (best_vec == 0 ? x : y)(best_coord) += best_sign * h;
      best += best_gain;
    }
    h *= 0.7;
  }
}

}  // namespace

const char* to_string(Quantity q) { return quantity_names[static_cast<int>(q)]; }
const char* to_string(Direction d) { return direction_names[static_cast<int>(d)]; }

std::vector<SamplePair> sample_pairs(int dim, long n, unsigned long long seed) {
  if (dim < 1 || n < 1) throw ValidationError("sample_pairs needs dim >= 1 and n >= 1");
  NormalSampler sampler(seed);
  std::vector<SamplePair> pairs;
  pairs.reserve(static_cast<size_t>(n));
  for (long i = 0; i < n; ++i) {
    const double scale = kScales[i % 3];
    Vector x = sampler.vector(dim, scale);
    Vector y = sampler.vector(dim, scale);
    pairs.push_back({std::move(x), std::move(y)});
  }
  return pairs;
}

std::vector<SamplePair> adversarial_pairs(const Operator& T) {
  std::vector<SamplePair> out;
  collect_pairs(T, out);
  return out;
}

ValueEstimate estimate_modulus(const Operator& T, long n, unsigned long long seed,
                               int refine_steps) {
  std::vector<SamplePair> pairs = sample_pairs(T.dim(), n, seed);
  std::vector<SamplePair> extra = adversarial_pairs(T);
  pairs.insert(pairs.end(), extra.begin(), extra.end());
  return estimate_modulus_on(T, pairs, seed, refine_steps);
}

ValueEstimate estimate_modulus_on(const Operator& T, const std::vector<SamplePair>& pairs,
                                  unsigned long long seed, int refine_steps) {
  if (pairs.empty()) throw ValidationError("estimate_modulus needs at least one pair");
  ValueEstimate est;
  est.quantity = Quantity::modulus;
  est.direction = Direction::lower_bound;
  est.seed = seed;
  est.samples_used = static_cast<long>(pairs.size());

  bool found = false;
  double best = 0.0;
  size_t best_idx = 0;
  for (size_t i = 0; i < pairs.size(); ++i) {
    RatioResult r = modulus_ratio(T, pairs[i].x, pairs[i].y);
    if (r.isometry) {
      est.value = 1.0;
      est.witness_x = pairs[i].x;
      est.witness_y = pairs[i].y;
      return est;
    }
    if (!r.valid) {
      ++est.skipped;
      continue;
    }
    if (!found || r.q > best) {
      found = true;
      best = r.q;
      best_idx = i;
    }
  }
  if (!found) {
    // Id - T is constant on every sampled pair: the shift case, lower bound 0
    est.value = 0.0;
    est.witness_x = pairs.front().x;
    est.witness_y = pairs.front().y;
    return est;
  }
  Vector wx = pairs[best_idx].x, wy = pairs[best_idx].y;
  if (refine_steps > 0) refine_witness(T, wx, wy, best, refine_steps);
  est.value = best;
  est.witness_x = std::move(wx);
  est.witness_y = std::move(wy);
  return est;
}

ValueEstimate estimate_value_on(Quantity kind, const VectorMap& A,
                                const std::vector<SamplePair>& pairs, unsigned long long seed) {
  if (kind == Quantity::modulus) {
    throw ValidationError("estimate_value_on handles cocoercive, monotone and lipschitz kinds");
  }
  ValueEstimate est;
  est.quantity = kind;
  est.direction = kind == Quantity::lipschitz_value ? Direction::lower_bound : Direction::upper_bound;
  est.seed = seed;
  est.samples_used = static_cast<long>(pairs.size());

  bool found = false;
  double best = 0.0;
  size_t best_idx = 0;
  for (size_t i = 0; i < pairs.size(); ++i) {
    Vector dx = pairs[i].x - pairs[i].y;
    const double ndx = dx.norm();
    if (ndx == 0.0) {
      ++est.skipped;
      continue;
    }
    Vector da = A(pairs[i].x) - A(pairs[i].y);
    double ratio;
    if (kind == Quantity::cocoercive_value) {
      const double nda = da.norm();
      if (nda <= kDegenerateDelta * ndx) {
        ++est.skipped;
        continue;
      }
      ratio = dx.dot(da) / da.squaredNorm();
      if (!found || ratio < best) {
        found = true;
        best = ratio;
        best_idx = i;
      }
    } else if (kind == Quantity::monotone_value) {
      ratio = dx.dot(da) / dx.squaredNorm();
      if (!found || ratio < best) {
        found = true;
        best = ratio;
        best_idx = i;
      }
    } else {
      ratio = da.norm() / ndx;
      if (!found || ratio > best) {
        found = true;
        best = ratio;
        best_idx = i;
      }
    }
  }
  if (!found) throw AllPairsDegenerate("estimate_value: no usable sampled pair");
  est.value = kind == Quantity::lipschitz_value ? best : std::max(0.0, best);
  est.witness_x = pairs[best_idx].x;
  est.witness_y = pairs[best_idx].y;
  return est;
}

ValueEstimate estimate_value(Quantity kind, const VectorMap& A, int dim, long n,
                             unsigned long long seed) {
  return estimate_value_on(kind, A, sample_pairs(dim, n, seed), seed);
}

ValueEstimate estimate_value(Quantity kind, const Operator& T, long n, unsigned long long seed) {
  std::vector<SamplePair> pairs = sample_pairs(T.dim(), n, seed);
  std::vector<SamplePair> extra = adversarial_pairs(T);
  pairs.insert(pairs.end(), extra.begin(), extra.end());
  return estimate_value_on(kind, [&T](const Vector& x) { return T(x); }, pairs, seed);
}

ValueEstimate estimate_value(Quantity kind, const MonotoneOperator& A, long n,
                             unsigned long long seed) {
  if (!A.can_apply()) {
    throw UnsupportedFunction("estimate_value needs a single-valued monotone operator");
  }
  std::vector<SamplePair> pairs = sample_pairs(A.dim(), n, seed);
  std::vector<SamplePair> extra;
  collect_monotone_pairs(A, extra);
  pairs.insert(pairs.end(), extra.begin(), extra.end());
  return estimate_value_on(kind, [&A](const Vector& x) { return A.apply(x); }, pairs, seed);
}

std::optional<SamplePair> falsify_averaged(const Operator& T, double k_claimed, long n,
                                           unsigned long long seed) {
  if (!(k_claimed >= 0.0 && k_claimed <= 1.0)) {
    throw ValidationError("falsify_averaged needs k in [0, 1]");
  }
  std::vector<SamplePair> pairs = sample_pairs(T.dim(), n, seed);
  std::vector<SamplePair> extra = adversarial_pairs(T);
  pairs.insert(pairs.end(), extra.begin(), extra.end());
  for (const auto& p : pairs) {
    Vector dx = p.x - p.y;
    Vector dt = T(p.x) - T(p.y);
    const double inner = dx.dot(dt);
    const double rhs = inner + (1.0 - 2.0 * k_claimed) * (inner - dx.squaredNorm());
    if (dt.squaredNorm() - rhs > 1e-10) return p;
  }
  return std::nullopt;
}

InversionResult invert_by_contraction(const Operator& T, const Vector& v, double tol,
                                      long max_iter) {
  require_dim(v, T.dim(), "invert_by_contraction");
  if (!(tol > 0.0) || max_iter < 1) throw ValidationError("invert_by_contraction needs tol > 0");
  ModulusBound mb = exact_modulus(T);
  if (mb.lower >= 0.5) {
    throw NotNormallyNonexpansive("invert_by_contraction: k(T) >= 1/2");
  }
  if (mb.upper >= 0.5) {
    ValueEstimate probe = estimate_modulus(T, 2000, 0, 0);
    if (probe.value >= 0.5) {
      throw NotNormallyNonexpansive("invert_by_contraction: estimated k(T) >= 1/2");
    }
  }
  Vector x = v;
  const double r0 = (T(v) - v).norm();
  for (long i = 0; i <= max_iter; ++i) {
    Vector tx = T(x);
    const double r = (tx - v).norm();
    if (r <= tol) return {std::move(x), r, i};
    if (!(r < 1e6 * (r0 + 1.0))) {
      throw NotNormallyNonexpansive("invert_by_contraction: iteration diverged");
    }
    x += v - tx;
  }
  throw MaxIterExceeded("invert_by_contraction: no solution within " + std::to_string(max_iter) +
                        " iterations");
}

BiLipschitzReport bilipschitz_check(const Operator& T, double k, long n, unsigned long long seed) {
  if (!(k < 0.5)) {
    throw NotNormallyNonexpansive("bilipschitz_check needs a modulus bound k < 1/2");
  }
  const double lower = 2.0 * (0.5 - k);
  std::vector<SamplePair> pairs = sample_pairs(T.dim(), n, seed);
  std::vector<SamplePair> extra = adversarial_pairs(T);
  pairs.insert(pairs.end(), extra.begin(), extra.end());
  BiLipschitzReport rep;
  rep.lower_factor = lower;
  rep.min_ratio = kInf;
  for (const auto& p : pairs) {
    Vector dx = p.x - p.y;
    const double ndx = dx.norm();
    if (ndx == 0.0) continue;
    const double ratio = (T(p.x) - T(p.y)).norm() / ndx;
    if (ratio < lower - 1e-10 || ratio > 1.0 + 1e-10) {
      throw ViolationFound("bilipschitz_check: ratio " + std::to_string(ratio) +
                               " escapes [" + std::to_string(lower) + ", 1]",
                           p.x, p.y, ratio);
    }
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    ++rep.pairs_checked;
  }
  return rep;
}

}  // namespace averop
