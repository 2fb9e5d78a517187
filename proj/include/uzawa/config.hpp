#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uzawa/saddle.hpp"
#include "uzawa/solver.hpp"

namespace uzawa {

// One solver run described as key=value lines; a config file holds one or
// more runs separated by blank lines, with '#' starting a comment.
struct RunSpec {
  std::string problem;  // elasticity | convection | stokes | algebraic | qp
  int n = 0;
  int m = 0;
  double nu = 1.0;
  double beta = 0.25;
  double b = 0.0;
  double mu = 1.0;
  double eps = 0.0;
  std::uint64_t seed = 1;

  std::string ahat = "jacobi";           // jacobi | ic0 | ict:TOL | exact
  std::string shat = "identity-plus-D";  // + pressure-mass | scaled-identity:C | diag-H | exact-H
  std::string variant = "alg1";          // alg1 | alg2 | alg3 | nonsymmetric
  bool theta_adaptive = false;
  double theta = 1.0;

  double tol = 1e-6;
  std::string stop = "stacked";  // stacked | max
  bool stop_relative = false;
  int max_iters = 100000;
  std::string x0 = "zeros";  // zeros | ones
  std::string y0 = "zeros";  // zeros | uniform:SEED
  std::string history;       // per-iteration CSV path, empty keeps none
  double inner_tol = 1e-6;   // inexact inner device (alg2/alg3)
  int inner_maxit = 200;
};

std::vector<RunSpec> parse_config_file(const std::string& path);
std::vector<RunSpec> parse_config_text(const std::string& text);

// Problem named by the spec, e.g. "run 2: stokes n=32 nu=1 alg1/ic0".
std::string describe(const RunSpec& spec);

struct RunOutcome {
  std::string label;
  SolveReport report;
};

// Builds the problem and devices, dispatches on the variant, and writes the
// history CSV when requested. Throws std::invalid_argument on an unusable
// spec and std::runtime_error on a numerical failure.
RunOutcome execute_run(const RunSpec& spec);

// Selector grammar name[:key=value,...], e.g. "elasticity:n=20" or
// "qp:n=40,m=10,eps=0.5,seed=7"; writes Matrix Market files plus meta.json.
void export_problem_selector(const std::string& selector, const std::string& dir);

}  // namespace uzawa
