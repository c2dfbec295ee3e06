#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "averop/json_io.hpp"

using namespace averop;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CLI_BIN) + " " + args + " > /tmp/averop_cli_out.json 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string corpus(const std::string& name) { return std::string(CORPUS_DIR) + "/" + name; }

json last_output() {
  std::ifstream in("/tmp/averop_cli_out.json");
  json j;
  in >> j;
  return j;
}

}  // namespace

TEST_CASE("cli analyze succeeds with exit code zero") {
  CHECK(run_cli("analyze " + corpus("ex_matrix_diag.json")) == 0);
  json rep = last_output();
  CHECK(rep["result"]["modulus"]["exact"] == true);
}

TEST_CASE("cli run uses the document command") {
  CHECK(run_cli("run " + corpus("ex_huber_prox.json")) == 0);
  json rep = last_output();
  CHECK(rep["command"] == "analyze");
  CHECK(rep["result"]["modulus"]["upper"].get<double>() == 0.25);
}

TEST_CASE("cli exit codes distinguish failure classes") {
  // parse failures: missing file, malformed JSON
  CHECK(run_cli("analyze /tmp/does_not_exist.json") == 2);
  {
    std::ofstream bad("/tmp/averop_bad.json");
    bad << "{ not json";
  }
  CHECK(run_cli("analyze /tmp/averop_bad.json") == 2);
  {
    std::ofstream bad("/tmp/averop_bad2.json");
    bad << R"({"schema": 1, "command": "analyze", "operator": {"op": "warp"}})";
  }
  CHECK(run_cli("analyze /tmp/averop_bad2.json") == 2);

  // validation failures: invariant violations, conflicting command, missing operands
  {
    std::ofstream bad("/tmp/averop_bad3.json");
    bad << R"({"schema": 1, "command": "analyze", "operator": {"op": "matrix", "data": [[2]]}})";
  }
  CHECK(run_cli("analyze /tmp/averop_bad3.json") == 3);
  CHECK(run_cli("estimate " + corpus("ex_matrix_diag.json")) == 3);
  {
    std::ofstream bad("/tmp/averop_bad4.json");
    bad << R"({"schema": 1, "command": "classify", "operator": {"op": "identity", "dim": 2}})";
  }
  CHECK(run_cli("classify /tmp/averop_bad4.json") == 3);

  // numerical failures: inversion precondition
  {
    std::ofstream bad("/tmp/averop_bad5.json");
    bad << R"({"schema": 1, "command": "invert",
               "operator": {"op": "matrix", "data": [[1, 0], [0, -0.5]]}, "v": [1, 1]})";
  }
  CHECK(run_cli("invert /tmp/averop_bad5.json") == 4);
}

TEST_CASE("cli flag overrides and outputs") {
  CHECK(run_cli("estimate " + corpus("ex_skew_monotone.json") + " --samples 500 --seed 3") == 0);
  json rep = last_output();
  CHECK(rep["request"]["params"]["samples"] == 500);
  CHECK(rep["request"]["params"]["seed"] == 3);

  CHECK(run_cli("iterate " + corpus("ex_dr_counterexample_iterate.json") +
                " --csv --out /tmp/averop_orbit.csv") == 0);
  std::ifstream csv("/tmp/averop_orbit.csv");
  std::string line;
  std::getline(csv, line);
  CHECK(line == "iter,x0,x1");
  std::getline(csv, line);
  CHECK(line == "0,4,10");
}

TEST_CASE("cli invert reproduces the direct solve") {
  CHECK(run_cli("invert " + corpus("ex_invert_quadratic_prox.json")) == 0);
  json rep = last_output();
  CHECK(std::abs(rep["result"]["inversion"]["x"][0].get<double>() - 4.0) < 1e-8);
  CHECK(rep["result"]["inversion"]["iterations"].get<long>() <= 120);
}

TEST_CASE("verify dispatch covers bilipschitz and falsification") {
  json doc = json::parse(R"({
    "schema": 1,
    "command": "verify",
    "operator": {"op": "prox", "function": {"type": "quadratic", "matrix": [[3]]}},
    "k": 0.375,
    "params": {"samples": 500}
  })");
  json rep = run_request(parse_request(doc));
  CHECK(rep["result"]["bilipschitz"]["lower_factor"].get<double>() == 0.25);
  CHECK(rep["result"]["bilipschitz"]["min_ratio"].get<double>() ==
        doctest::Approx(0.25).epsilon(1e-12));

  json fd = json::parse(R"({
    "schema": 1,
    "command": "estimate",
    "operator": {"op": "matrix", "data": [[1, 0], [0, -0.5]]},
    "falsify_k": 0.5,
    "params": {"samples": 2000}
  })");
  json frep = run_request(parse_request(fd));
  CHECK(frep["result"]["violated"] == true);

  json fd2 = json::parse(R"({
    "schema": 1,
    "command": "estimate",
    "operator": {"op": "projection", "set": {"type": "ball", "center": [0, 0], "radius": 1}},
    "falsify_k": 0.5,
    "params": {"samples": 2000}
  })");
  json frep2 = run_request(parse_request(fd2));
  CHECK(frep2["result"]["violated"] == false);
}
