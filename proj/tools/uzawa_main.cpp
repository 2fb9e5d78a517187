#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "uzawa/bench.hpp"
#include "uzawa/config.hpp"
#include "uzawa/theory.hpp"
#include "uzawa/tolerances.hpp"

namespace {

int do_run(const std::string& config_path) {
  const std::vector<uzawa::RunSpec> specs = uzawa::parse_config_file(config_path);
  int k = 0;
  for (const uzawa::RunSpec& spec : specs) {
    ++k;
    const uzawa::RunOutcome out = uzawa::execute_run(spec);
    const uzawa::SolveReport& rep = out.report;
    const char* status = rep.converged ? "converged" : rep.diverged ? "diverged" : "maxit";
    std::printf("run %d: %s -> status=%s iterations=%d fnorm=%.6g gnorm=%.6g seconds=%.3f", k,
                out.label.c_str(), status, rep.iterations, rep.final_fnorm, rep.final_gnorm,
                rep.seconds);
    if (!spec.history.empty()) std::printf(" history=%s", spec.history.c_str());
    std::printf("\n");
  }
  return 0;
}

int do_table(const std::string& name, const std::string& out_dir, const std::string& format) {
  const uzawa::BenchTable t = uzawa::run_table(name);
  std::filesystem::create_directories(out_dir);
  const std::string stem = out_dir + "/" + t.name;
  if (format == "md") {
    std::ofstream md(stem + ".md");
    uzawa::require(md.good(), "table: cannot open " + stem + ".md");
    md << uzawa::render_table_markdown(t);
    std::printf("wrote %s.md\n", stem.c_str());
  } else {
    uzawa::write_table_csv(t, stem + ".csv");
    uzawa::write_table_meta(t, stem + ".meta.json");
    std::printf("wrote %s.csv and %s.meta.json\n", stem.c_str(), stem.c_str());
  }
  int gated = 0, passed = 0;
  for (const uzawa::BenchCell& c : t.cells)
    if (c.gate != "probe") {
      ++gated;
      if (c.pass) ++passed;
    }
  std::printf("%s: %zu cells, %d/%d gated cells within tolerance, rule %s, %.1f s -> %s\n",
              t.name.c_str(), t.cells.size(), passed, gated,
              t.rule_labels[static_cast<std::size_t>(t.selected_rule)].c_str(), t.seconds,
              t.gates_pass ? "PASS" : "FAIL");
  return t.gates_pass ? 0 : 1;
}

int do_verify(std::uint64_t seed, int count) {
  namespace tol = uzawa::tol;
  const uzawa::TheoryCheckResult res = uzawa::run_theory_checks(seed, count);
  std::printf("corpus: instances=%d iterations=%d seconds=%.2f\n", res.instances,
              res.iterations_checked, res.seconds);
  std::printf("lemma bound violations:        %d\n", res.lemma_violations);
  std::printf("omega interval violations:     %d\n", res.omega_bound_violations);
  std::printf("theorem contraction misses:    %d (hypothesis met %d times)\n",
              res.theorem_violations, res.hypothesis_met);
  std::printf("per-iteration rate violations: %d of %d\n", res.rate1_violations,
              res.rate1_checked);
  std::printf("F-matrix bound violations:     %d of %d\n", res.fi_bound_violations,
              res.fi_bound_checked);
  std::printf("concrete interval (informational): %d of %d outside\n",
              res.concrete_interval_violations, res.concrete_interval_checked);
  bool ok = res.lemma_violations == 0 && res.omega_bound_violations == 0 &&
            res.theorem_violations == 0 && res.rate1_violations == 0 &&
            res.fi_bound_violations == 0;
  for (const double kappa : {4.0, 16.0, 64.0}) {
    const uzawa::CorollaryResult c = uzawa::run_corollary(kappa);
    const bool rate_ok =
        std::fabs(c.measured_rate - c.sqrt_alpha) <= tol::kCorollaryRel * c.sqrt_alpha;
    const double target = 1.0 / c.kappa1;
    const bool z_ok = c.z_min >= target * (1.0 - tol::kZClusterEps) &&
                      c.z_max <= target * (1.0 + tol::kZClusterEps);
    std::printf(
        "corollary kappa=%g: rate=%.6f sqrt(alpha)=%.6f z=[%.6g, %.6g] iterations=%d %s\n",
        kappa, c.measured_rate, c.sqrt_alpha, c.z_min, c.z_max, c.iterations,
        rate_ok && z_ok ? "ok" : "MISS");
    ok = ok && rate_ok && z_ok;
  }
  std::printf("verify-theory: %s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inexact Uzawa solvers with two variable relaxation parameters"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "Execute solver runs from a config file");
  run->add_option("--config", config_path, "key=value stanzas separated by blank lines")
      ->required();

  std::string table_name, table_dir = ".", table_format = "csv";
  CLI::App* table = app.add_subcommand("table", "Reproduce one benchmark table");
  table->add_option("name", table_name, "table1|table2|table3|table4")->required();
  table->add_option("--out", table_dir, "output directory (default: current)");
  table->add_option("--format", table_format, "csv|md (default: csv)")
      ->check(CLI::IsMember({"csv", "md"}));

  std::uint64_t seed = 42;
  int count = 50;
  CLI::App* verify =
      app.add_subcommand("verify-theory", "Check the convergence bounds on a random corpus");
  verify->add_option("--seed", seed, "corpus seed (default 42)");
  verify->add_option("--count", count, "corpus size (default 50)")->check(CLI::PositiveNumber);

  std::string selector, export_dir;
  CLI::App* exp =
      app.add_subcommand("export-problem", "Write a generated problem as Matrix Market files");
  exp->add_option("selector", selector, "name[:key=value,...], e.g. elasticity:n=20")->required();
  exp->add_option("--out", export_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return do_run(config_path);
    if (*table) return do_table(table_name, table_dir, table_format);
    if (*verify) return do_verify(seed, count);
    uzawa::export_problem_selector(selector, export_dir);
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
