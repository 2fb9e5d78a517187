#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "doctest.h"
#include "uzawa/config.hpp"

using namespace uzawa;

namespace {

std::string tmp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("config text parses stanzas, comments, and typed values") {
  const std::string text =
      "# first run\n"
      "problem = elasticity\n"
      "n=20\n"
      "theta = 0.5   # trailing comment\n"
      "ahat = ict:0.02\n"
      "stop_relative = true\n"
      "history = /tmp/h.csv\n"
      "\n"
      "problem=qp\n"
      "n=24\n"
      "m=6\n"
      "eps=0.5\n"
      "seed=11\n"
      "variant=alg2\n"
      "theta=adaptive\n"
      "inner_maxit=77\n";
  const std::vector<RunSpec> specs = parse_config_text(text);
  REQUIRE(specs.size() == 2);

  CHECK(specs[0].problem == "elasticity");
  CHECK(specs[0].n == 20);
  CHECK(specs[0].theta == doctest::Approx(0.5));
  CHECK_FALSE(specs[0].theta_adaptive);
  CHECK(specs[0].ahat == "ict:0.02");
  CHECK(specs[0].stop_relative);
  CHECK(specs[0].history == "/tmp/h.csv");

  CHECK(specs[1].problem == "qp");
  CHECK(specs[1].m == 6);
  CHECK(specs[1].seed == 11);
  CHECK(specs[1].variant == "alg2");
  CHECK(specs[1].theta_adaptive);
  CHECK(specs[1].inner_maxit == 77);
  CHECK(describe(specs[1]).find("theta=adaptive") != std::string::npos);
}

TEST_CASE("config parse errors carry line numbers") {
  CHECK_THROWS_WITH_AS(parse_config_text("problem=qp\nwhat=3\n"),
                       "config line 2: unknown key 'what'", std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text("n=abc\n"), "config line 1: bad integer 'abc' for n",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text("theta 0.5\n"),
                       "config line 1: expected key=value, got 'theta 0.5'",
                       std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("# only comments\n\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("problem=qp\nstop_relative=maybe\n"), std::invalid_argument);
}

TEST_CASE("execute_run drives every variant on small problems") {
  RunSpec s;
  s.problem = "qp";
  s.n = 24;
  s.m = 6;
  s.eps = 0.5;
  s.seed = 11;
  s.ahat = "jacobi";
  s.shat = "diag-H";
  s.theta = 0.6;
  s.tol = 1e-8;
  s.max_iters = 4000;

  SUBCASE("alg1 with diag-H and a history file") {
    s.history = tmp_path("uzawa_cfg_hist.csv");
    const RunOutcome out = execute_run(s);
    CHECK(out.report.converged);
    CHECK(out.report.iterations > 0);
    std::ifstream in(s.history);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "iter,fnorm,gnorm,omega,tauhat,tau,theta");
    std::remove(s.history.c_str());
  }

  SUBCASE("alg2 wraps the ahat device in truncated pcg") {
    s.variant = "alg2";
    s.ahat = "ic0";
    s.inner_tol = 1e-12;
    s.inner_maxit = 200;
    const RunOutcome out = execute_run(s);
    CHECK(out.report.converged);
  }

  SUBCASE("alg3 wraps the shat device in truncated pcg") {
    s.variant = "alg3";
    s.shat = "scaled-identity:1.0";
    s.inner_tol = 1e-12;
    const RunOutcome out = execute_run(s);
    CHECK(out.report.converged);
  }

  SUBCASE("exact-H equals an assembled Schur complement solve") {
    s.shat = "exact-H";
    s.ahat = "exact";
    const RunOutcome out = execute_run(s);
    CHECK(out.report.converged);
    // with exact devices and theta below one the iteration is very fast
    CHECK(out.report.iterations < 60);
  }
}

TEST_CASE("execute_run covers the grid problems") {
  SUBCASE("stokes with pressure mass and max-component stop") {
    RunSpec s;
    s.problem = "stokes";
    s.n = 8;
    s.nu = 1.0;
    s.ahat = "ic0";
    s.shat = "pressure-mass";
    s.theta = 0.1;
    s.stop = "max";
    s.tol = 1e-6;
    s.y0 = "uniform:1";
    s.max_iters = 20000;
    const RunOutcome out = execute_run(s);
    CHECK(out.report.converged);
    CHECK(out.report.final_finf <= 1e-6);
  }

  SUBCASE("nonsymmetric convection with the symmetric-part device") {
    RunSpec s;
    s.problem = "convection";
    s.n = 6;
    s.b = 1.0;
    s.ahat = "ic0";
    s.shat = "identity-plus-D";
    s.theta = 0.5;
    s.tol = 1e-8;
    s.variant = "nonsymmetric";
    s.max_iters = 5000;
    const RunOutcome out = execute_run(s);
    CHECK(out.report.converged);
  }

  SUBCASE("adaptive theta estimates the spectrum and converges") {
    RunSpec s;
    s.problem = "elasticity";
    s.n = 6;
    s.ahat = "jacobi";
    s.shat = "identity-plus-D";
    s.theta_adaptive = true;
    s.x0 = "ones";
    s.tol = 1e-6;
    s.max_iters = 20000;
    const RunOutcome out = execute_run(s);
    CHECK(out.report.converged);
    CHECK(describe(s).find("theta=adaptive") != std::string::npos);
  }

  SUBCASE("algebraic with the scaled-identity Schur device") {
    RunSpec s;
    s.problem = "algebraic";
    s.n = 60;
    s.m = 45;
    s.ahat = "exact";
    s.shat = "scaled-identity:2.0";
    s.theta = 0.9;
    s.tol = 1e-10;
    s.stop_relative = true;
    s.max_iters = 2000;
    const RunOutcome out = execute_run(s);
    CHECK(out.report.converged);
  }
}

TEST_CASE("execute_run rejects unusable specs") {
  RunSpec s;
  s.problem = "qp";
  s.n = 10;
  s.m = 3;
  s.eps = 0.1;

  SUBCASE("unknown problem") {
    s.problem = "heat";
    CHECK_THROWS_AS(execute_run(s), std::invalid_argument);
  }
  SUBCASE("unknown ahat device") {
    s.ahat = "ilu";
    CHECK_THROWS_AS(execute_run(s), std::invalid_argument);
  }
  SUBCASE("unknown shat device") {
    s.shat = "mass";
    CHECK_THROWS_AS(execute_run(s), std::invalid_argument);
  }
  SUBCASE("unknown variant") {
    s.variant = "alg4";
    CHECK_THROWS_AS(execute_run(s), std::invalid_argument);
  }
  SUBCASE("pressure mass needs a grid") {
    s.shat = "pressure-mass";
    CHECK_THROWS_AS(execute_run(s), std::invalid_argument);
  }
  SUBCASE("adaptive theta needs a linear-device variant") {
    s.variant = "alg2";
    s.theta_adaptive = true;
    CHECK_THROWS_AS(execute_run(s), std::invalid_argument);
  }
  SUBCASE("unknown stop rule") {
    s.stop = "energy";
    CHECK_THROWS_AS(execute_run(s), std::invalid_argument);
  }
}

TEST_CASE("export selector writes the matrix market bundle") {
  const std::string dir = tmp_path("uzawa_export_sel");
  std::filesystem::remove_all(dir);
  export_problem_selector("qp:n=10,m=3,eps=0.25,seed=3", dir);
  for (const char* f : {"A.mtx", "B.mtx", "D.mtx", "f.mtx", "g.mtx", "x_star.mtx", "y_star.mtx",
                        "meta.json"})
    CHECK(std::filesystem::exists(std::filesystem::path(dir) / f));
  std::filesystem::remove_all(dir);

  CHECK_THROWS_AS(export_problem_selector("qp:n=10,m=3,tol=0.5", "/tmp/x"),
                  std::invalid_argument);
  CHECK_THROWS_AS(export_problem_selector("qp:n", "/tmp/x"), std::invalid_argument);
  CHECK_THROWS_AS(export_problem_selector("fluid:n=4", "/tmp/x"), std::invalid_argument);
}
