#include "averop/identities.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "averop/operator.hpp"
#include "averop/sampling.hpp"

namespace averop {

namespace {

constexpr double kScales[] = {0.1, 1.0, 10.0};

struct Operand {
  std::string name;
  MonotoneOperator A;
};

std::vector<Operand> default_operands() {
  Matrix two(1, 1);
  two << 2.0;
  Matrix skew(2, 2);
  skew << 0.0, -1.0, 1.0, 0.0;
  Matrix quad(2, 2);
  quad << 2.0, 0.0, 0.0, 1.0;
  std::vector<Operand> ops;
  ops.push_back({"linear diag(2)", MonotoneOperator::linear(two)});
  ops.push_back({"linear skew", MonotoneOperator::linear(skew)});
  ops.push_back({"normal cone of the unit ball",
                 MonotoneOperator::normal_cone(ConvexSet::ball(Vector::Zero(2), 1.0))});
  ops.push_back({"subdifferential of a quadratic",
                 MonotoneOperator::subdifferential(ConvexFunction::quadratic(quad))});
  return ops;
}

const double kGrid[] = {0.5, 1.0, 2.0};

double run_points(long points, unsigned long long seed, int dim,
                  const std::function<double(const Vector&)>& residual_at) {
  NormalSampler sampler(seed);
  double worst = 0.0;
  for (long i = 0; i < points; ++i) {
    Vector x = sampler.vector(dim, kScales[i % 3]);
    worst = std::max(worst, residual_at(x));
  }
  return worst;
}

IdentityCase make_case(std::string name, double residual, double tol) {
  return IdentityCase{std::move(name), residual, residual <= tol};
}

std::string grid_tag(double mu, double alpha) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), " (mu=%g, a=%g)", mu, alpha);
  return buf;
}

// --- individual suites ----------------------------------------------------

void suite_yosida_resolvent(std::vector<IdentityCase>& out, long points, unsigned long long seed,
                            double tol) {
  for (const auto& op : default_operands()) {
    for (double mu : kGrid) {
      for (double alpha : kGrid) {
        double r = run_points(points / 4 + 1, seed, op.A.dim(), [&](const Vector& x) {
          Vector via_iteration = resolvent_of_yosida_by_iteration(op.A, mu, alpha, x);
          Vector via_formula =
              (mu / (mu + alpha)) * x + (alpha / (mu + alpha)) * op.A.resolvent(x, mu + alpha);
          return (via_iteration - via_formula).norm();
        });
        out.push_back(make_case("J_{aY_mu(A)} blend, A = " + op.name + grid_tag(mu, alpha), r, tol));
      }
    }
  }
}

void suite_yosida_relaxation(std::vector<IdentityCase>& out, long points, unsigned long long seed,
                             double tol) {
  for (const auto& op : default_operands()) {
    for (double alpha : {0.25, 0.5, 0.75}) {
      const double mu = 1.0 - alpha;
      double r = run_points(points / 2 + 1, seed, op.A.dim(), [&](const Vector& x) {
        Vector via_iteration = resolvent_of_yosida_by_iteration(op.A, mu, alpha, x);
        Vector via_relaxation = (1.0 - alpha) * x + alpha * op.A.resolvent(x, 1.0);
        return (via_iteration - via_relaxation).norm();
      });
      out.push_back(
          make_case("J_{aY_{1-a}(A)} relaxation, A = " + op.name + grid_tag(mu, alpha), r, tol));
    }
    // zero-scale edge: J_{0 * Y_1(A)} is the identity with modulus 0
    Operator edge = Operator::resolvent(MonotoneOperator::yosida(1.0, op.A), 0.0);
    ModulusBound mb = exact_modulus(edge);
    double kr = std::abs(mb.upper) + std::abs(mb.lower);
    Vector probe = Vector::Ones(op.A.dim());
    kr = std::max(kr, (edge(probe) - probe).norm());
    out.push_back(make_case("zero-scale resolvent edge, A = " + op.name, kr, tol));
  }
}

void suite_yosida_classic(std::vector<IdentityCase>& out, long points, unsigned long long seed,
                          double tol) {
  for (const auto& op : default_operands()) {
    for (double mu : kGrid) {
      double r = run_points(points, seed, op.A.dim(), [&](const Vector& x) {
        MonotoneOperator Y = MonotoneOperator::yosida(mu, op.A);
        Vector y = Y.apply(x);  // mu^{-1}(x - J_{mu A} x)
        Vector z = x - mu * y;
        // graph membership: y in A(z) iff J_A(z + y) = z
        double res = (op.A.resolvent(z + y, 1.0) - z).norm();
        // for invertible linear A, also the literal definition (mu Id + A^{-1})^{-1}
        if (const auto* lin = std::get_if<monos::LinearMonotone>(&op.A.node())) {
          Eigen::FullPivLU<Matrix> lu(lin->M);
          if (lu.isInvertible()) {
            Matrix W = mu * Matrix::Identity(x.size(), x.size()) + lin->M.inverse();
            Vector y2 = W.partialPivLu().solve(x);
            res = std::max(res, (y2 - y).norm());
          }
        }
        return res;
      });
      out.push_back(make_case("Y_mu(A) = (Id - J_{mu A})/mu, A = " + op.name + grid_tag(mu, 0), r,
                              tol));
    }
  }
}

void suite_moreau_prox(std::vector<IdentityCase>& out, long points, unsigned long long seed,
                       double tol) {
  Matrix two(1, 1);
  two << 2.0;
  std::vector<std::pair<std::string, ConvexFunction>> funcs;
  funcs.emplace_back("quadratic diag(2)", ConvexFunction::quadratic(two));
  funcs.emplace_back("indicator of the unit ball",
                     ConvexFunction::indicator(ConvexSet::ball(Vector::Zero(2), 1.0)));
  funcs.emplace_back("huber", ConvexFunction::huber(1.0, 1.0, 2));
  funcs.emplace_back("support of a box",
                     ConvexFunction::support(
                         ConvexSet::box(-Vector::Ones(2), Vector::Ones(2)), 1.0));
  for (const auto& [name, f] : funcs) {
    MonotoneOperator df = MonotoneOperator::subdifferential(f);
    for (double mu : kGrid) {
      for (double alpha : kGrid) {
        ConvexFunction env = ConvexFunction::moreau_envelope(f, mu, alpha);
        double r = run_points(points / 4 + 1, seed, f.dim(), [&](const Vector& x) {
          Vector via_env = env.prox(x, 1.0);
          Vector via_blend =
              (mu / (mu + alpha)) * x + (alpha / (mu + alpha)) * f.prox(x, mu + alpha);
          Vector via_iteration = resolvent_of_yosida_by_iteration(df, mu, alpha, x);
          return std::max((via_env - via_blend).norm(), (via_env - via_iteration).norm());
        });
        out.push_back(make_case("prox of a Moreau envelope, f = " + name + grid_tag(mu, alpha), r,
                                tol));
      }
    }
  }
}

void suite_normal_cone_yosida(std::vector<IdentityCase>& out, long points, unsigned long long seed,
                              double tol) {
  std::vector<std::pair<std::string, ConvexSet>> cs;
  cs.emplace_back("unit ball", ConvexSet::ball(Vector::Zero(2), 1.0));
  cs.emplace_back("box", ConvexSet::box(-Vector::Ones(2), Vector::Ones(2)));
  {
    Vector nrm(2);
    nrm << 1.0, 1.0;
    cs.emplace_back("halfspace", ConvexSet::halfspace(nrm, 0.0));
  }
  for (const auto& [name, C] : cs) {
    MonotoneOperator nc = MonotoneOperator::normal_cone(C);
    for (double mu : kGrid) {
      MonotoneOperator Y = MonotoneOperator::yosida(mu, nc);
      double r = run_points(points / 2 + 1, seed, C.dim(), [&](const Vector& x) {
        Vector lhs = Y.resolvent(x, 1.0);
        Vector rhs = (mu / (mu + 1.0)) * x + (1.0 / (mu + 1.0)) * C.project(x);
        return (lhs - rhs).norm();
      });
      // modulus formula k = 1 / (2(mu+1))
      const double k = resolvent_modulus(Y, 1.0);
      r = std::max(r, std::abs(k - 1.0 / (2.0 * (mu + 1.0))));
      out.push_back(make_case("J_{Y_mu(N_C)} blend and modulus, C = " + name + grid_tag(mu, 1), r,
                              tol));
    }
  }
}

void suite_reflected_resolvent(std::vector<IdentityCase>& out, long /*points*/,
                               unsigned long long /*seed*/, double tol) {
  // k(R_A) = 2 k(J_A), cross-checked against the quadratic-form route where
  // the reflected resolvent is a matrix
  for (const auto& op : default_operands()) {
    const auto* lin = std::get_if<monos::LinearMonotone>(&op.A.node());
    const auto* sub = std::get_if<monos::Subdifferential>(&op.A.node());
    Matrix M;
    if (lin) {
      M = lin->M;
    } else if (sub) {
      auto aff = prox_affine(sub->f, 1.0);
      if (!aff) continue;
      M.resize(0, 0);
      const Eigen::Index d = aff->M.rows();
      Matrix refl = 2.0 * aff->M - Matrix::Identity(d, d);
      const double via_matrix = matrix_modulus(refl);
      const double via_formula = 2.0 * resolvent_modulus(op.A, 1.0);
      out.push_back(make_case("k(R_A) = 2 k(J_A), A = " + op.name,
                              std::abs(via_matrix - via_formula), std::max(tol, 1e-9)));
      continue;
    } else {
      continue;
    }
    const Eigen::Index d = M.rows();
    Matrix J = (Matrix::Identity(d, d) + M).partialPivLu().solve(Matrix::Identity(d, d));
    Matrix refl = 2.0 * J - Matrix::Identity(d, d);
    const double via_matrix = matrix_modulus(refl);
    const double via_formula = 2.0 * resolvent_modulus(op.A, 1.0);
    out.push_back(make_case("k(R_A) = 2 k(J_A), A = " + op.name,
                            std::abs(via_matrix - via_formula), std::max(tol, 1e-9)));
  }
  // reflector route: R_{N_C} = 2 P_C - Id has modulus 1 = 2 * (1/2)
  ConvexSet ball = ConvexSet::ball(Vector::Zero(2), 1.0);
  const double via_reflector = exact_modulus(Operator::reflector(ball)).upper;
  const double via_formula = 2.0 * resolvent_modulus(MonotoneOperator::normal_cone(ball), 1.0);
  out.push_back(make_case("k(R_{N_C}) = 2 k(P_C)", std::abs(via_reflector - via_formula), tol));
}

void suite_resolvent_inverse(std::vector<IdentityCase>& out, long points, unsigned long long seed,
                             double tol) {
  std::vector<Operand> ops = default_operands();
  ops.push_back({"Yosida of the ball normal cone",
                 MonotoneOperator::yosida(
                     1.0, MonotoneOperator::normal_cone(ConvexSet::ball(Vector::Zero(2), 1.0)))});
  ops.push_back({"subdifferential of huber",
                 MonotoneOperator::subdifferential(ConvexFunction::huber(1.0, 1.0, 2))});
  for (const auto& op : ops) {
    if (!op.A.can_apply()) continue;
    double r = run_points(points, seed, op.A.dim(), [&](const Vector& x) {
      Vector j = op.A.resolvent(x, 1.0);
      return (j + op.A.apply(j) - x).norm();
    });
    out.push_back(make_case("x = J_A x + A(J_A x), A = " + op.name, r, std::max(tol, 1e-10)));
  }
}

void suite_slab_projection(std::vector<IdentityCase>& out, long points, unsigned long long seed,
                           double tol) {
  Vector n1(2), n2(2);
  n1 << 1.0, 1.0;   // x + y >= 0
  n2 << -1.0, 0.0;  // x <= 2
  ConvexSet slab = ConvexSet::halfspace_intersection(
      {HalfspaceData{n1, 0.0}, HalfspaceData{n2, -2.0}}, 1e-12, 100000);
  double r = run_points(std::max<long>(points, 100), seed, 2, [&](const Vector& z) {
    return (slab.project(z) - slab_reference_projection(z)).norm();
  });
  out.push_back(make_case("Dykstra slab projector vs closed form", r, std::max(tol, 1e-8)));
}

}  // namespace

Vector resolvent_of_yosida_by_iteration(const MonotoneOperator& A, double mu, double alpha,
                                        const Vector& x, double tol, long max_iter) {
  if (!(mu > 0.0) || !(alpha > 0.0)) throw ValidationError("yosida iteration needs mu, alpha > 0");
  // z = J_{alpha Y_mu(A)} x satisfies z = (mu x + alpha w)/(mu + alpha) with
  // w = J_{mu A} z; the w-update is an (alpha/(mu+alpha))-contraction
  Vector w = A.resolvent(x, mu);
  for (long i = 0; i < max_iter; ++i) {
    Vector z = (mu * x + alpha * w) / (mu + alpha);
    Vector w_next = A.resolvent(z, mu);
    const double step = (w_next - w).norm();
    w = std::move(w_next);
    if (step <= tol) break;
    if (i + 1 == max_iter) throw NonConvergence("yosida resolvent iteration did not settle");
  }
  return (mu * x + alpha * w) / (mu + alpha);
}

Vector slab_reference_projection(const Vector& z) {
  const double x = z(0), y = z(1);
  Vector r(2);
  if (x >= 2.0 && y >= -2.0) {
    r << 2.0, y;
    return r;
  }
  if (y <= std::min(x - 4.0, -2.0)) {
    r << 2.0, -2.0;
    return r;
  }
  if (x - 4.0 < y && y <= -x) {
    r << (x - y) / 2.0, -(x - y) / 2.0;
    return r;
  }
  return z;
}

std::vector<std::string> identity_suites() {
  return {"yosida_resolvent",  "yosida_relaxation",   "yosida_classic",    "moreau_prox",
          "normal_cone_yosida", "reflected_resolvent", "resolvent_inverse", "slab_projection",
          "all"};
}

IdentityReport verify_identities(const std::string& suite, long points, unsigned long long seed,
                                 double tol) {
  IdentityReport report;
  report.suite = suite;
  auto run = [&](const std::string& name) {
    if (name == "yosida_resolvent") {
      suite_yosida_resolvent(report.cases, points, seed, tol);
    } else if (name == "yosida_relaxation") {
      suite_yosida_relaxation(report.cases, points, seed, tol);
    } else if (name == "yosida_classic") {
      suite_yosida_classic(report.cases, points, seed, tol);
    } else if (name == "moreau_prox") {
      suite_moreau_prox(report.cases, points, seed, tol);
    } else if (name == "normal_cone_yosida") {
      suite_normal_cone_yosida(report.cases, points, seed, tol);
    } else if (name == "reflected_resolvent") {
      suite_reflected_resolvent(report.cases, points, seed, tol);
    } else if (name == "resolvent_inverse") {
      suite_resolvent_inverse(report.cases, points, seed, tol);
    } else if (name == "slab_projection") {
      suite_slab_projection(report.cases, points, seed, tol);
    } else {
      throw ValidationError("unknown identity suite: " + name);
    }
  };
  if (suite == "all") {
    for (const auto& s : identity_suites()) {
      if (s != "all") run(s);
    }
  } else {
    run(suite);
  }
  report.max_residual = 0.0;
  report.pass = true;
  for (const auto& c : report.cases) {
    report.max_residual = std::max(report.max_residual, c.max_residual);
    report.pass = report.pass && c.pass;
  }
  return report;
}

}  // namespace averop
