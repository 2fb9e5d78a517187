#pragma once

#include "uzawa/csr.hpp"
#include "uzawa/vec.hpp"

namespace uzawa {

// Block system [A B; Bt -D] (x; y) = (f; g) with A n-by-n SPD (or
// positive-definite symmetric part in the nonsymmetric variant),
// B n-by-m, D m-by-m symmetric positive semidefinite.
struct SaddleProblem {
  SparseMatrix A;
  SparseMatrix B;
  SparseMatrix D;
  Vector f;
  Vector g;
  bool symmetric_a = true;

  bool has_solution = false;
  Vector x_star;
  Vector y_star;

  // mesh width when the problem comes from a grid; 0 otherwise
  double h = 0.0;

  int n() const { return A.rows; }
  int m() const { return B.cols; }
};

// Throws on dimension mismatch, asymmetric A when symmetric_a, or an
// indefinite D probe.
void validate(const SaddleProblem& p);

}  // namespace uzawa
