#include "averop/json_io.hpp"

#include <chrono>
#include <cinttypes>
#include <cstdio>

#include "averop/version.hpp"

namespace averop {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

const json& field(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_number()) fail(where, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

long integer(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_number_integer()) fail(where, std::string("field '") + key + "' must be an integer");
  return v.get<long>();
}

std::string text(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_string()) fail(where, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

Vector parse_vector(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(where, "expected numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

// matrices are arrays of rows (row-major)
Matrix parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of rows");
  const size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) fail(where, "expected rows to be arrays");
  const size_t cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) fail(where, "ragged matrix rows");
    for (size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) fail(where, "expected numbers");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

// basis vectors are serialized as a list of vectors (one per column)
Matrix parse_basis(const json& j, int ambient, const std::string& where) {
  if (!j.is_array()) fail(where, "basis must be an array of vectors");
  Matrix b(ambient, static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    Vector col = parse_vector(j[i], where + ".basis");
    if (col.size() != ambient) fail(where, "basis vector dimension mismatch");
    b.col(static_cast<Eigen::Index>(i)) = col;
  }
  return b;
}

json basis_json(const Matrix& b) {
  json a = json::array();
  for (Eigen::Index c = 0; c < b.cols(); ++c) a.push_back(vector_json(b.col(c)));
  return a;
}

}  // namespace

ConvexSet parse_set(const json& j) {
  const std::string where = "set";
  if (!j.is_object()) fail(where, "expected an object");
  const std::string type = text(j, "type", where);
  if (type == "box") {
    return ConvexSet::box(parse_vector(field(j, "lower", where), where),
                          parse_vector(field(j, "upper", where), where));
  }
  if (type == "ball") {
    return ConvexSet::ball(parse_vector(field(j, "center", where), where),
                           number(j, "radius", where));
  }
  if (type == "halfspace") {
    return ConvexSet::halfspace(parse_vector(field(j, "normal", where), where),
                                number(j, "offset", where));
  }
  if (type == "subspace") {
    const int dim = static_cast<int>(integer(j, "dim", where));
    return ConvexSet::linear_subspace(parse_basis(field(j, "basis", where), dim, where));
  }
  if (type == "affine_subspace") {
    Vector anchor = parse_vector(field(j, "anchor", where), where);
    Matrix basis = parse_basis(field(j, "basis", where), static_cast<int>(anchor.size()), where);
    return ConvexSet::affine_subspace(std::move(basis), std::move(anchor));
  }
  if (type == "singleton") {
    return ConvexSet::singleton(parse_vector(field(j, "point", where), where));
  }
  if (type == "halfspace_intersection") {
    const json& parts = field(j, "halfspaces", where);
    if (!parts.is_array() || parts.empty()) fail(where, "halfspaces must be a non-empty array");
    std::vector<HalfspaceData> hs;
    for (const auto& p : parts) {
      hs.push_back({parse_vector(field(p, "normal", where), where), number(p, "offset", where)});
    }
    double tol = j.value("tol", 1e-10);
    long sweeps = j.value("max_sweeps", 100000L);
    return ConvexSet::halfspace_intersection(std::move(hs), tol, sweeps);
  }
  fail(where, "unknown set type '" + type + "'");
}

json serialize_set(const ConvexSet& s) {
  struct V {
    json operator()(const sets::Box& b) const {
      return {{"type", "box"}, {"lower", vector_json(b.lower)}, {"upper", vector_json(b.upper)}};
    }
    json operator()(const sets::Ball& b) const {
      return {{"type", "ball"}, {"center", vector_json(b.center)}, {"radius", b.radius}};
    }
    json operator()(const sets::Halfspace& h) const {
      return {{"type", "halfspace"}, {"normal", vector_json(h.h.normal)}, {"offset", h.h.offset}};
    }
    json operator()(const sets::LinearSubspace& l) const {
      return {{"type", "subspace"},
              {"dim", static_cast<int>(l.basis.rows())},
              {"basis", basis_json(l.basis)}};
    }
    json operator()(const sets::AffineSubspace& a) const {
      return {{"type", "affine_subspace"},
              {"anchor", vector_json(a.anchor)},
              {"basis", basis_json(a.basis)}};
    }
    json operator()(const sets::Singleton& p) const {
      return {{"type", "singleton"}, {"point", vector_json(p.point)}};
    }
    json operator()(const sets::HalfspaceIntersection& hi) const {
      json parts = json::array();
      for (const auto& h : hi.parts) {
        parts.push_back({{"normal", vector_json(h.normal)}, {"offset", h.offset}});
      }
      return {{"type", "halfspace_intersection"},
              {"halfspaces", std::move(parts)},
              {"tol", hi.tol},
              {"max_sweeps", hi.max_sweeps}};
    }
  };
  return std::visit(V{}, s.node());
}

ConvexFunction parse_function(const json& j) {
  const std::string where = "function";
  if (!j.is_object()) fail(where, "expected an object");
  const std::string type = text(j, "type", where);
  if (type == "indicator") return ConvexFunction::indicator(parse_set(field(j, "set", where)));
  if (type == "quadratic") {
    return ConvexFunction::quadratic(parse_matrix(field(j, "matrix", where), where));
  }
  if (type == "half_dist_sq") {
    return ConvexFunction::half_distance_squared(parse_set(field(j, "set", where)),
                                                 number(j, "alpha", where));
  }
  if (type == "huber") {
    return ConvexFunction::huber(number(j, "mu", where), number(j, "alpha", where),
                                 static_cast<int>(integer(j, "dim", where)));
  }
  if (type == "support") {
    return ConvexFunction::support(parse_set(field(j, "set", where)), number(j, "lambda", where));
  }
  if (type == "moreau") {
    return ConvexFunction::moreau_envelope(parse_function(field(j, "inner", where)),
                                           number(j, "mu", where), number(j, "alpha", where));
  }
  if (type == "scalar_pwc") {
    std::vector<double> bp = field(j, "breakpoints", where).get<std::vector<double>>();
    std::vector<double> sl = field(j, "slopes", where).get<std::vector<double>>();
    return ConvexFunction::scalar_piecewise(std::move(bp), std::move(sl));
  }
  fail(where, "unknown function type '" + type + "'");
}

json serialize_function(const ConvexFunction& f) {
  struct V {
    json operator()(const funcs::Indicator& v) const {
      return {{"type", "indicator"}, {"set", serialize_set(v.set)}};
    }
    json operator()(const funcs::Quadratic& v) const {
      return {{"type", "quadratic"}, {"matrix", matrix_json(v.Q)}};
    }
    json operator()(const funcs::HalfDistanceSquared& v) const {
      return {{"type", "half_dist_sq"}, {"set", serialize_set(v.set)}, {"alpha", v.alpha}};
    }
    json operator()(const funcs::Huber& v) const {
      return {{"type", "huber"}, {"mu", v.mu}, {"alpha", v.alpha}, {"dim", v.dim}};
    }
    json operator()(const funcs::Support& v) const {
      return {{"type", "support"}, {"set", serialize_set(v.set)}, {"lambda", v.lambda}};
    }
    json operator()(const funcs::MoreauEnvelope& v) const {
      return {{"type", "moreau"},
              {"inner", serialize_function(*v.inner)},
              {"mu", v.mu},
              {"alpha", v.alpha}};
    }
    json operator()(const funcs::ScalarPiecewiseConvex& v) const {
      return {{"type", "scalar_pwc"}, {"breakpoints", v.breakpoints}, {"slopes", v.slopes}};
    }
  };
  return std::visit(V{}, f.node());
}

MonotoneOperator parse_monotone(const json& j) {
  const std::string where = "mono";
  if (!j.is_object()) fail(where, "expected an object");
  const std::string type = text(j, "type", where);
  if (type == "subdifferential") {
    return MonotoneOperator::subdifferential(parse_function(field(j, "function", where)));
  }
  if (type == "linear") {
    return MonotoneOperator::linear(parse_matrix(field(j, "matrix", where), where));
  }
  if (type == "normal_cone") {
    return MonotoneOperator::normal_cone(parse_set(field(j, "set", where)));
  }
  if (type == "scaled") {
    return MonotoneOperator::scaled(number(j, "alpha", where),
                                    parse_monotone(field(j, "inner", where)));
  }
  if (type == "yosida") {
    return MonotoneOperator::yosida(number(j, "mu", where),
                                    parse_monotone(field(j, "inner", where)));
  }
  fail(where, "unknown monotone operator type '" + type + "'");
}

json serialize_monotone(const MonotoneOperator& m) {
  struct V {
    json operator()(const monos::Subdifferential& v) const {
      return {{"type", "subdifferential"}, {"function", serialize_function(v.f)}};
    }
    json operator()(const monos::LinearMonotone& v) const {
      return {{"type", "linear"}, {"matrix", matrix_json(v.M)}};
    }
    json operator()(const monos::NormalCone& v) const {
      return {{"type", "normal_cone"}, {"set", serialize_set(v.set)}};
    }
    json operator()(const monos::Scaled& v) const {
      return {{"type", "scaled"}, {"alpha", v.alpha}, {"inner", serialize_monotone(*v.inner)}};
    }
    json operator()(const monos::Yosida& v) const {
      return {{"type", "yosida"}, {"mu", v.mu}, {"inner", serialize_monotone(*v.inner)}};
    }
  };
  return std::visit(V{}, m.node());
}

Operator parse_operator(const json& j) {
  const std::string where = "operator";
  if (!j.is_object()) fail(where, "expected an object");
  const std::string op = text(j, "op", where);
  if (op == "identity") return Operator::identity(static_cast<int>(integer(j, "dim", where)));
  if (op == "constant") return Operator::constant(parse_vector(field(j, "value", where), where));
  if (op == "shift") return Operator::shift(parse_vector(field(j, "offset", where), where));
  if (op == "matrix") return Operator::linear(parse_matrix(field(j, "data", where), where));
  if (op == "affine") {
    return Operator::affine(parse_matrix(field(j, "matrix", where), where),
                            parse_vector(field(j, "offset", where), where));
  }
  if (op == "projection") return Operator::projection(parse_set(field(j, "set", where)));
  if (op == "reflector") return Operator::reflector(parse_set(field(j, "set", where)));
  if (op == "prox") return Operator::prox(parse_function(field(j, "function", where)));
  if (op == "resolvent") {
    return Operator::resolvent(parse_monotone(field(j, "mono", where)), j.value("alpha", 1.0));
  }
  if (op == "reflected_resolvent") {
    return Operator::reflected_resolvent(parse_monotone(field(j, "mono", where)));
  }
  if (op == "relaxation") {
    return Operator::relaxation(number(j, "lambda", where),
                                parse_operator(field(j, "inner", where)));
  }
  if (op == "compose" || op == "convex_combination") {
    const json& inner = field(j, "inner", where);
    if (!inner.is_array() || inner.empty()) fail(where, "'inner' must be a non-empty array");
    std::vector<Operator> parts;
    for (const auto& p : inner) parts.push_back(parse_operator(p));
    if (op == "compose") return Operator::compose(std::move(parts));
    std::vector<double> w = field(j, "weights", where).get<std::vector<double>>();
    return Operator::convex_combination(std::move(w), std::move(parts));
  }
  if (op == "douglas_rachford") {
    return Operator::douglas_rachford(parse_set(field(j, "a", where)),
                                      parse_set(field(j, "b", where)));
  }
  if (op == "scalar_piecewise") {
    std::vector<double> bp = field(j, "breakpoints", where).get<std::vector<double>>();
    const json& pj = field(j, "pieces", where);
    if (!pj.is_array()) fail(where, "'pieces' must be an array");
    std::vector<ops::AffinePiece> pieces;
    for (const auto& p : pj) {
      pieces.push_back({number(p, "slope", where), number(p, "intercept", where)});
    }
    return Operator::scalar_piecewise(std::move(bp), std::move(pieces));
  }
  if (op == "limit") {
    return Operator::limit(parse_operator(field(j, "inner", where)), j.value("tol", 1e-10),
                           j.value("max_iter", 1000000L));
  }
  fail(where, "unknown operator '" + op + "'");
}

json serialize_operator(const Operator& t) {
  struct V {
    json operator()(const ops::Identity& v) const { return {{"op", "identity"}, {"dim", v.dim}}; }
    json operator()(const ops::Constant& v) const {
      return {{"op", "constant"}, {"value", vector_json(v.value)}};
    }
    json operator()(const ops::Shift& v) const {
      return {{"op", "shift"}, {"offset", vector_json(v.offset)}};
    }
    json operator()(const ops::LinearMatrix& v) const {
      return {{"op", "matrix"}, {"data", matrix_json(v.M)}};
    }
    json operator()(const ops::Affine& v) const {
      return {{"op", "affine"}, {"matrix", matrix_json(v.M)}, {"offset", vector_json(v.offset)}};
    }
    json operator()(const ops::Projection& v) const {
      return {{"op", "projection"}, {"set", serialize_set(v.set)}};
    }
    json operator()(const ops::Reflector& v) const {
      return {{"op", "reflector"}, {"set", serialize_set(v.set)}};
    }
    json operator()(const ops::Prox& v) const {
      return {{"op", "prox"}, {"function", serialize_function(v.f)}};
    }
    json operator()(const ops::Resolvent& v) const {
      return {{"op", "resolvent"}, {"mono", serialize_monotone(v.A)}, {"alpha", v.alpha}};
    }
    json operator()(const ops::ReflectedResolvent& v) const {
      return {{"op", "reflected_resolvent"}, {"mono", serialize_monotone(v.A)}};
    }
    json operator()(const ops::Relaxation& v) const {
      return {{"op", "relaxation"}, {"lambda", v.lambda}, {"inner", serialize_operator(*v.inner)}};
    }
    json operator()(const ops::Compose& v) const {
      json inner = json::array();
      for (const auto& f : v.factors) inner.push_back(serialize_operator(f));
      return {{"op", "compose"}, {"inner", std::move(inner)}};
    }
    json operator()(const ops::ConvexCombination& v) const {
      json inner = json::array();
      for (const auto& t : v.terms) inner.push_back(serialize_operator(t));
      return {{"op", "convex_combination"}, {"weights", v.weights}, {"inner", std::move(inner)}};
    }
    json operator()(const ops::DouglasRachford& v) const {
      return {{"op", "douglas_rachford"}, {"a", serialize_set(v.a)}, {"b", serialize_set(v.b)}};
    }
    json operator()(const ops::ScalarPiecewise& v) const {
      json pieces = json::array();
      for (const auto& p : v.pieces) {
        pieces.push_back({{"slope", p.slope}, {"intercept", p.intercept}});
      }
      return {{"op", "scalar_piecewise"}, {"breakpoints", v.breakpoints}, {"pieces", std::move(pieces)}};
    }
    json operator()(const ops::LimitOperator& v) const {
      return {{"op", "limit"},
              {"inner", serialize_operator(*v.inner)},
              {"tol", v.tol},
              {"max_iter", v.max_iter}};
    }
  };
  return std::visit(V{}, t.node());
}

// --- requests ---------------------------------------------------------------

AnalysisRequest parse_request(const json& j) {
  const std::string where = "request";
  if (!j.is_object()) fail(where, "expected an object");
  if (!j.contains("schema") || !j["schema"].is_number_integer() || j["schema"].get<int>() != 1) {
    fail(where, "missing or unsupported 'schema' (expected 1)");
  }
  AnalysisRequest r;
  r.command = text(j, "command", where);
  static const char* known[] = {"analyze", "estimate", "iterate", "invert", "classify", "verify"};
  bool ok = false;
  for (const char* k : known) ok = ok || r.command == k;
  if (!ok) fail(where, "unknown command '" + r.command + "'");

  if (j.contains("params")) {
    const json& p = j["params"];
    r.params.seed = p.value("seed", 0ULL);
    r.params.samples = p.value("samples", 10000L);
    r.params.tol = p.value("tol", 1e-10);
    r.params.max_iter = p.value("max_iter", 1000000L);
    r.params.refine = p.value("refine", 0);
    if (r.params.samples < 1 || !(r.params.tol > 0.0) || r.params.max_iter < 1 ||
        r.params.refine < 0) {
      throw ValidationError("request params must be positive");
    }
  }
  if (j.contains("operator")) r.op = parse_operator(j["operator"]);
  if (j.contains("mono")) r.mono = parse_monotone(j["mono"]);
  if (j.contains("fix_set")) r.fix_set = parse_set(j["fix_set"]);
  if (j.contains("x0")) r.x0 = parse_vector(j["x0"], where + ".x0");
  if (j.contains("v")) r.v = parse_vector(j["v"], where + ".v");
  if (j.contains("quantity")) r.quantity = j["quantity"].get<std::string>();
  if (j.contains("falsify_k")) r.falsify_k = j["falsify_k"].get<double>();
  if (j.contains("k")) r.bilipschitz_k = j["k"].get<double>();
  if (j.contains("suite")) r.suite = j["suite"].get<std::string>();
  if (j.contains("probes")) {
    for (const auto& p : j["probes"]) r.probes.push_back(parse_vector(p, where + ".probes"));
  }
  return r;
}

json serialize_request(const AnalysisRequest& r) {
  json j;
  j["schema"] = 1;
  j["command"] = r.command;
  j["params"] = {{"seed", r.params.seed},
                 {"samples", r.params.samples},
                 {"tol", r.params.tol},
                 {"max_iter", r.params.max_iter},
                 {"refine", r.params.refine}};
  if (r.op) j["operator"] = serialize_operator(*r.op);
  if (r.mono) j["mono"] = serialize_monotone(*r.mono);
  if (r.fix_set) j["fix_set"] = serialize_set(*r.fix_set);
  if (r.x0) j["x0"] = vector_json(*r.x0);
  if (r.v) j["v"] = vector_json(*r.v);
  if (r.quantity) j["quantity"] = *r.quantity;
  if (r.falsify_k) j["falsify_k"] = *r.falsify_k;
  if (r.bilipschitz_k) j["k"] = *r.bilipschitz_k;
  if (r.suite) j["suite"] = *r.suite;
  if (!r.probes.empty()) {
    json p = json::array();
    for (const auto& v : r.probes) p.push_back(vector_json(v));
    j["probes"] = p;
  }
  return j;
}

json serialize_bound(const ModulusBound& b) {
  json trace = json::array();
  for (const auto& s : b.trace) trace.push_back({{"rule", s.rule}, {"note", s.note}});
  return {{"lower", b.lower}, {"upper", b.upper}, {"exact", b.exact}, {"trace", std::move(trace)}};
}

json serialize_estimate(const ValueEstimate& e) {
  return {{"quantity", to_string(e.quantity)},
          {"direction", to_string(e.direction)},
          {"value", e.value},
          {"witness_x", vector_json(e.witness_x)},
          {"witness_y", vector_json(e.witness_y)},
          {"samples_used", e.samples_used},
          {"skipped", e.skipped},
          {"seed", e.seed}};
}

namespace {

Quantity quantity_from(const std::string& s) {
  if (s == "modulus") return Quantity::modulus;
  if (s == "cocoercive_value") return Quantity::cocoercive_value;
  if (s == "monotone_value") return Quantity::monotone_value;
  if (s == "lipschitz_value") return Quantity::lipschitz_value;
  throw ValidationError("unknown quantity '" + s + "'");
}

json run_analyze(const AnalysisRequest& r) {
  if (!r.op) throw ValidationError("analyze needs an operator");
  return {{"modulus", serialize_bound(exact_modulus(*r.op))}};
}

json run_estimate(const AnalysisRequest& r) {
  json out;
  const std::string q = r.quantity.value_or("modulus");
  if (r.falsify_k) {
    if (!r.op) throw ValidationError("falsification needs an operator");
    auto w = falsify_averaged(*r.op, *r.falsify_k, r.params.samples, r.params.seed);
    out["falsify_k"] = *r.falsify_k;
    out["violated"] = w.has_value();
    if (w) {
      out["witness_x"] = json::array();
      for (Eigen::Index i = 0; i < w->x.size(); ++i) out["witness_x"].push_back(w->x(i));
      out["witness_y"] = json::array();
      for (Eigen::Index i = 0; i < w->y.size(); ++i) out["witness_y"].push_back(w->y(i));
    }
    return out;
  }
  const Quantity kind = quantity_from(q);
  ValueEstimate e;
  if (kind == Quantity::modulus) {
    if (!r.op) throw ValidationError("estimate modulus needs an operator");
    e = estimate_modulus(*r.op, r.params.samples, r.params.seed, r.params.refine);
  } else if (r.mono) {
    e = estimate_value(kind, *r.mono, r.params.samples, r.params.seed);
  } else if (r.op) {
    e = estimate_value(kind, *r.op, r.params.samples, r.params.seed);
  } else {
    throw ValidationError("estimate needs an operator or a monotone operator");
  }
  out["estimate"] = serialize_estimate(e);
  return out;
}

json run_iterate(const AnalysisRequest& r) {
  if (!r.op || !r.x0) throw ValidationError("iterate needs an operator and x0");
  Orbit o = orbit(*r.op, *r.x0, r.params.tol, r.params.max_iter);
  json pts = json::array();
  for (const auto& p : o.points) {
    json row = json::array();
    for (Eigen::Index i = 0; i < p.size(); ++i) row.push_back(p(i));
    pts.push_back(std::move(row));
  }
  return {{"orbit",
           {{"points", std::move(pts)},
            {"converged", o.converged},
            {"residual", o.residual},
            {"iterations", o.iterations}}}};
}

json run_invert(const AnalysisRequest& r) {
  if (!r.op || !r.v) throw ValidationError("invert needs an operator and v");
  InversionResult res = invert_by_contraction(*r.op, *r.v, r.params.tol, r.params.max_iter);
  json x = json::array();
  for (Eigen::Index i = 0; i < res.x.size(); ++i) x.push_back(res.x(i));
  return {{"inversion",
           {{"x", std::move(x)}, {"residual", res.residual}, {"iterations", res.iterations}}}};
}

json run_classify(const AnalysisRequest& r) {
  if (!r.op || !r.fix_set) throw ValidationError("classify needs an operator and fix_set");
  ClassifyReport rep =
      classify_limit(*r.op, *r.fix_set, r.params.samples, r.params.seed, r.params.tol, r.probes);
  json out;
  out["verdict"] = to_string(rep.verdict);
  out["points_checked"] = rep.points_checked;
  out["limit_modulus_estimate"] = serialize_estimate(rep.limit_modulus_estimate);
  if (rep.witness) {
    json w;
    w["x"] = json::array();
    for (Eigen::Index i = 0; i < rep.witness->x.size(); ++i) w["x"].push_back(rep.witness->x(i));
    w["limit"] = json::array();
    for (Eigen::Index i = 0; i < rep.witness->limit.size(); ++i) {
      w["limit"].push_back(rep.witness->limit(i));
    }
    w["nearest_fixed"] = json::array();
    for (Eigen::Index i = 0; i < rep.witness->nearest_fixed.size(); ++i) {
      w["nearest_fixed"].push_back(rep.witness->nearest_fixed(i));
    }
    w["dist_limit"] = rep.witness->dist_limit;
    w["dist_nearest"] = rep.witness->dist_nearest;
    out["witness"] = std::move(w);
  }
  return {{"classification", std::move(out)}};
}

json run_verify(const AnalysisRequest& r) {
  if (r.bilipschitz_k && r.op) {
    BiLipschitzReport rep =
        bilipschitz_check(*r.op, *r.bilipschitz_k, r.params.samples, r.params.seed);
    return {{"bilipschitz",
             {{"min_ratio", rep.min_ratio},
              {"max_ratio", rep.max_ratio},
              {"lower_factor", rep.lower_factor},
              {"pairs_checked", rep.pairs_checked}}}};
  }
  if (!r.suite) throw ValidationError("verify needs a suite name (or an operator with k)");
  IdentityReport rep = verify_identities(*r.suite, r.params.samples, r.params.seed,
                                         std::max(r.params.tol, 1e-9));
  json cases = json::array();
  for (const auto& c : rep.cases) {
    cases.push_back({{"name", c.name}, {"max_residual", c.max_residual}, {"pass", c.pass}});
  }
  return {{"identities",
           {{"suite", rep.suite},
            {"cases", std::move(cases)},
            {"max_residual", rep.max_residual},
            {"pass", rep.pass}}}};
}

}  // namespace

json run_request(const AnalysisRequest& r) {
  const auto start = std::chrono::steady_clock::now();
  json result;
  if (r.command == "analyze") {
    result = run_analyze(r);
  } else if (r.command == "estimate") {
    result = run_estimate(r);
  } else if (r.command == "iterate") {
    result = run_iterate(r);
  } else if (r.command == "invert") {
    result = run_invert(r);
  } else if (r.command == "classify") {
    result = run_classify(r);
  } else if (r.command == "verify") {
    result = run_verify(r);
  } else {
    throw ValidationError("unknown command '" + r.command + "'");
  }
  const auto stop = std::chrono::steady_clock::now();
  json report;
  report["schema"] = 1;
  report["command"] = r.command;
  report["request"] = serialize_request(r);
  report["result"] = std::move(result);
  report["wall_time_s"] = std::chrono::duration<double>(stop - start).count();
  report["version"] = kVersion;
  return report;
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::optional<std::string> report_to_csv(const json& report) {
  const json& result = report.at("result");
  if (result.contains("orbit")) {
    const json& pts = result["orbit"]["points"];
    std::string out = "iter";
    const size_t dim = pts.empty() ? 0 : pts[0].size();
    for (size_t i = 0; i < dim; ++i) out += ",x" + std::to_string(i);
    out += "\n";
    for (size_t i = 0; i < pts.size(); ++i) {
      out += std::to_string(i);
      for (size_t c = 0; c < dim; ++c) out += "," + fmt17(pts[i][c].get<double>());
      out += "\n";
    }
    return out;
  }
  if (result.contains("estimate")) {
    const json& e = result["estimate"];
    std::string out = "quantity,direction,value,samples_used,skipped,seed\n";
    out += e["quantity"].get<std::string>() + "," + e["direction"].get<std::string>() + "," +
           fmt17(e["value"].get<double>()) + "," + std::to_string(e["samples_used"].get<long>()) +
           "," + std::to_string(e["skipped"].get<long>()) + "," +
           std::to_string(e["seed"].get<unsigned long long>()) + "\n";
    return out;
  }
  return std::nullopt;
}

}  // namespace averop
