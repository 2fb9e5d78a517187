#pragma once

#include <string>
#include <vector>

#include "uzawa/solver.hpp"

namespace uzawa {

// One benchmark cell: problem coordinates, the published reference count (if
// any), and the measured counts. Iteration counts follow the published
// convention of one more than the number of completed y-updates.
struct BenchCell {
  std::string precond;
  double theta = 0.0;
  int n = 0;        // grid or matrix size, table specific
  int m = 0;        // y-block size where it is not implied
  double nu = 0.0;  // table 2 viscosity
  double b = 0.0;   // table 4 convection coefficient
  int published = -1;
  double published_cpu = -1.0;  // informational, never gated
  int measured = -1;
  std::vector<int> rule_counts;  // per stop rule in BenchTable::rule_labels
  std::string status;            // ok | maxit | diverged | error: ...
  double final_fnorm = 0.0, final_gnorm = 0.0;
  double seconds = 0.0;
  // exact | jacobi | conv | probe; probe cells are recorded but never judged
  std::string gate = "conv";
  bool pass = false;
};

struct BenchTable {
  std::string name;
  std::string stop_note;
  std::vector<std::string> rule_labels;
  int selected_rule = 0;  // rule used for the measured column
  std::vector<BenchCell> cells;
  double seconds = 0.0;
  bool gates_pass = false;
};

BenchTable run_table1();
BenchTable run_table2();
BenchTable run_table3();
BenchTable run_table4();
// Dispatch by name: table1|table2|table3|table4 (bare digits accepted).
BenchTable run_table(const std::string& name);

// Counts and norms only, %.17g floats: byte-identical across repeated runs.
void write_table_csv(const BenchTable& t, const std::string& path);
// Timing, timestamp, and calibration summary live in the sidecar instead.
void write_table_meta(const BenchTable& t, const std::string& path);
std::string render_table_markdown(const BenchTable& t);

}  // namespace uzawa
