#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uzawa/bench.hpp"
#include "uzawa/config.hpp"
#include "uzawa/problems.hpp"
#include "uzawa/theory.hpp"

namespace py = pybind11;
using namespace uzawa;

namespace {

// (rows, cols, vals, (nrows, ncols)): enough to rebuild a scipy coo_matrix
py::tuple to_coo(const SparseMatrix& M) {
  std::vector<int> rows, cols;
  rows.reserve(static_cast<std::size_t>(M.nnz()));
  cols.reserve(static_cast<std::size_t>(M.nnz()));
  for (int i = 0; i < M.rows; ++i)
    for (int p = M.row_ptr[i]; p < M.row_ptr[i + 1]; ++p) {
      rows.push_back(i);
      cols.push_back(M.col_idx[p]);
    }
  return py::make_tuple(rows, cols, M.vals, py::make_tuple(M.rows, M.cols));
}

}  // namespace

PYBIND11_MODULE(uzawa, m) {
  m.doc() = "Inexact Uzawa solvers with two variable relaxation parameters";
  m.attr("__version__") = "1.0.0";

  py::class_<SaddleProblem>(m, "SaddleProblem")
      .def_property_readonly("n", &SaddleProblem::n)
      .def_property_readonly("m", &SaddleProblem::m)
      .def_readonly("h", &SaddleProblem::h)
      .def_readonly("symmetric_a", &SaddleProblem::symmetric_a)
      .def_readonly("f", &SaddleProblem::f)
      .def_readonly("g", &SaddleProblem::g)
      .def_readonly("has_solution", &SaddleProblem::has_solution)
      .def_readonly("x_star", &SaddleProblem::x_star)
      .def_readonly("y_star", &SaddleProblem::y_star)
      .def("a_coo", [](const SaddleProblem& p) { return to_coo(p.A); })
      .def("b_coo", [](const SaddleProblem& p) { return to_coo(p.B); })
      .def("d_coo", [](const SaddleProblem& p) { return to_coo(p.D); });

  m.def("gen_elasticity", &gen_elasticity, py::arg("n"), py::arg("mu") = 1.0);
  m.def("gen_convection", &gen_convection, py::arg("n"), py::arg("b"), py::arg("mu") = 1.0);
  m.def("gen_stokes_q1p0", &gen_stokes_q1p0, py::arg("n"), py::arg("nu"),
        py::arg("beta") = 0.25);
  m.def("gen_algebraic", &gen_algebraic, py::arg("n"), py::arg("m"));
  m.def("gen_random_qp", &gen_random_qp, py::arg("n"), py::arg("m"), py::arg("eps"),
        py::arg("seed"));
  m.def("export_problem", &export_problem, py::arg("problem"), py::arg("name"), py::arg("dir"));

  py::class_<HistoryRow>(m, "HistoryRow")
      .def_readonly("iter", &HistoryRow::iter)
      .def_readonly("fnorm", &HistoryRow::fnorm)
      .def_readonly("gnorm", &HistoryRow::gnorm)
      .def_readonly("omega", &HistoryRow::omega)
      .def_readonly("tauhat", &HistoryRow::tauhat)
      .def_readonly("tau", &HistoryRow::tau)
      .def_readonly("theta", &HistoryRow::theta);

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("iterations", &SolveReport::iterations)
      .def_readonly("converged", &SolveReport::converged)
      .def_readonly("diverged", &SolveReport::diverged)
      .def_readonly("initial_fnorm", &SolveReport::initial_fnorm)
      .def_readonly("initial_gnorm", &SolveReport::initial_gnorm)
      .def_readonly("final_fnorm", &SolveReport::final_fnorm)
      .def_readonly("final_gnorm", &SolveReport::final_gnorm)
      .def_readonly("final_finf", &SolveReport::final_finf)
      .def_readonly("final_ginf", &SolveReport::final_ginf)
      .def_readonly("x", &SolveReport::x)
      .def_readonly("y", &SolveReport::y)
      .def_readonly("history", &SolveReport::history)
      .def_readonly("seconds", &SolveReport::seconds);

  py::class_<RunSpec>(m, "RunSpec")
      .def(py::init<>())
      .def_readwrite("problem", &RunSpec::problem)
      .def_readwrite("n", &RunSpec::n)
      .def_readwrite("m", &RunSpec::m)
      .def_readwrite("nu", &RunSpec::nu)
      .def_readwrite("beta", &RunSpec::beta)
      .def_readwrite("b", &RunSpec::b)
      .def_readwrite("mu", &RunSpec::mu)
      .def_readwrite("eps", &RunSpec::eps)
      .def_readwrite("seed", &RunSpec::seed)
      .def_readwrite("ahat", &RunSpec::ahat)
      .def_readwrite("shat", &RunSpec::shat)
      .def_readwrite("variant", &RunSpec::variant)
      .def_readwrite("theta_adaptive", &RunSpec::theta_adaptive)
      .def_readwrite("theta", &RunSpec::theta)
      .def_readwrite("tol", &RunSpec::tol)
      .def_readwrite("stop", &RunSpec::stop)
      .def_readwrite("stop_relative", &RunSpec::stop_relative)
      .def_readwrite("max_iters", &RunSpec::max_iters)
      .def_readwrite("x0", &RunSpec::x0)
      .def_readwrite("y0", &RunSpec::y0)
      .def_readwrite("history", &RunSpec::history)
      .def_readwrite("inner_tol", &RunSpec::inner_tol)
      .def_readwrite("inner_maxit", &RunSpec::inner_maxit)
      .def("__repr__", [](const RunSpec& s) { return "<RunSpec " + describe(s) + ">"; });

  py::class_<RunOutcome>(m, "RunOutcome")
      .def_readonly("label", &RunOutcome::label)
      .def_readonly("report", &RunOutcome::report);

  m.def("describe", &describe, py::arg("spec"));
  m.def("execute_run", &execute_run, py::arg("spec"),
        py::call_guard<py::gil_scoped_release>());
  m.def("parse_config_text", &parse_config_text, py::arg("text"));
  m.def("parse_config_file", &parse_config_file, py::arg("path"));
  m.def("export_problem_selector", &export_problem_selector, py::arg("selector"),
        py::arg("dir"));

  py::class_<BenchCell>(m, "BenchCell")
      .def_readonly("precond", &BenchCell::precond)
      .def_readonly("theta", &BenchCell::theta)
      .def_readonly("n", &BenchCell::n)
      .def_readonly("m", &BenchCell::m)
      .def_readonly("nu", &BenchCell::nu)
      .def_readonly("b", &BenchCell::b)
      .def_readonly("published", &BenchCell::published)
      .def_readonly("published_cpu", &BenchCell::published_cpu)
      .def_readonly("measured", &BenchCell::measured)
      .def_readonly("rule_counts", &BenchCell::rule_counts)
      .def_readonly("status", &BenchCell::status)
      .def_readonly("final_fnorm", &BenchCell::final_fnorm)
      .def_readonly("final_gnorm", &BenchCell::final_gnorm)
      .def_readonly("gate", &BenchCell::gate)
      .def_readonly("passed", &BenchCell::pass)
      .def_readonly("seconds", &BenchCell::seconds);

  py::class_<BenchTable>(m, "BenchTable")
      .def_readonly("name", &BenchTable::name)
      .def_readonly("stop_note", &BenchTable::stop_note)
      .def_readonly("rule_labels", &BenchTable::rule_labels)
      .def_readonly("selected_rule", &BenchTable::selected_rule)
      .def_readonly("cells", &BenchTable::cells)
      .def_readonly("seconds", &BenchTable::seconds)
      .def_readonly("gates_pass", &BenchTable::gates_pass);

  m.def("run_table", &run_table, py::arg("name"), py::call_guard<py::gil_scoped_release>());
  m.def("render_table_markdown", &render_table_markdown, py::arg("table"));
  m.def("write_table_csv", &write_table_csv, py::arg("table"), py::arg("path"));
  m.def("write_table_meta", &write_table_meta, py::arg("table"), py::arg("path"));

  py::class_<TheoryCheckResult>(m, "TheoryCheckResult")
      .def_readonly("instances", &TheoryCheckResult::instances)
      .def_readonly("iterations_checked", &TheoryCheckResult::iterations_checked)
      .def_readonly("lemma_violations", &TheoryCheckResult::lemma_violations)
      .def_readonly("omega_bound_violations", &TheoryCheckResult::omega_bound_violations)
      .def_readonly("theorem_violations", &TheoryCheckResult::theorem_violations)
      .def_readonly("hypothesis_met", &TheoryCheckResult::hypothesis_met)
      .def_readonly("rate1_checked", &TheoryCheckResult::rate1_checked)
      .def_readonly("rate1_violations", &TheoryCheckResult::rate1_violations)
      .def_readonly("fi_bound_checked", &TheoryCheckResult::fi_bound_checked)
      .def_readonly("fi_bound_violations", &TheoryCheckResult::fi_bound_violations)
      .def_readonly("concrete_interval_checked", &TheoryCheckResult::concrete_interval_checked)
      .def_readonly("concrete_interval_violations",
                    &TheoryCheckResult::concrete_interval_violations)
      .def_readonly("seconds", &TheoryCheckResult::seconds);

  py::class_<CorollaryResult>(m, "CorollaryResult")
      .def_readonly("kappa1", &CorollaryResult::kappa1)
      .def_readonly("alpha", &CorollaryResult::alpha)
      .def_readonly("sqrt_alpha", &CorollaryResult::sqrt_alpha)
      .def_readonly("measured_rate", &CorollaryResult::measured_rate)
      .def_readonly("z_min", &CorollaryResult::z_min)
      .def_readonly("z_max", &CorollaryResult::z_max)
      .def_readonly("iterations", &CorollaryResult::iterations);

  m.def("run_theory_checks", &run_theory_checks, py::arg("corpus_seed"), py::arg("count"),
        py::call_guard<py::gil_scoped_release>());
  m.def("run_corollary", &run_corollary, py::arg("kappa"),
        py::call_guard<py::gil_scoped_release>());
}
