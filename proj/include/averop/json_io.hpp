#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "averop/convex_function.hpp"
#include "averop/convex_set.hpp"
#include "averop/dynamics.hpp"
#include "averop/estimate.hpp"
#include "averop/identities.hpp"
#include "averop/modulus.hpp"
#include "averop/monotone.hpp"
#include "averop/operator.hpp"

namespace averop {

using json = nlohmann::json;

// --- operator documents ----------------------------------------------------

ConvexSet parse_set(const json& j);
ConvexFunction parse_function(const json& j);
MonotoneOperator parse_monotone(const json& j);
Operator parse_operator(const json& j);

json serialize_set(const ConvexSet& s);
json serialize_function(const ConvexFunction& f);
json serialize_monotone(const MonotoneOperator& m);
json serialize_operator(const Operator& t);

// --- analysis requests ------------------------------------------------------

struct AnalysisParams {
  unsigned long long seed = 0;
  long samples = 10000;
  double tol = 1e-10;
  long max_iter = 1000000;
  int refine = 0;
};

struct AnalysisRequest {
  std::string command;  // analyze | estimate | iterate | invert | classify | verify
  AnalysisParams params;
  std::optional<Operator> op;
  std::optional<MonotoneOperator> mono;
  std::optional<ConvexSet> fix_set;
  std::optional<Vector> x0;
  std::optional<Vector> v;
  std::optional<std::string> quantity;
  std::optional<double> falsify_k;
  std::optional<double> bilipschitz_k;
  std::optional<std::string> suite;
  std::vector<Vector> probes;
};

AnalysisRequest parse_request(const json& j);
json serialize_request(const AnalysisRequest& r);

// Dispatches the request and returns the full report (request echo,
// results, wall time, library version).
json run_request(const AnalysisRequest& r);

// CSV rendering for orbits and estimate tables; other commands keep JSON.
std::optional<std::string> report_to_csv(const json& report);

json serialize_bound(const ModulusBound& b);
json serialize_estimate(const ValueEstimate& e);

}  // namespace averop
