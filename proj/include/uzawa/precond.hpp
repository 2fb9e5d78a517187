#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "uzawa/csr.hpp"
#include "uzawa/dense.hpp"
#include "uzawa/vec.hpp"

namespace uzawa {

// Approximate inverse action of an SPD operator.
class Precond {
 public:
  virtual ~Precond() = default;
  virtual Vector apply(const Vector& v) const = 0;
  virtual int dim() const = 0;
  // False for truncated-iteration devices whose action depends on the input.
  virtual bool linear() const { return true; }
  // Inexactness proxy for nonlinear devices (requested relative residual).
  virtual double delta() const { return 0.0; }
  virtual std::string name() const = 0;
};

using PrecondPtr = std::shared_ptr<const Precond>;
using LinOp = std::function<Vector(const Vector&)>;

// Lower-triangular factor in compressed sparse column form, rows sorted
// ascending within each column, diagonal entry first.
struct CscLower {
  int n = 0;
  std::vector<int> col_ptr;
  std::vector<int> row_idx;
  std::vector<double> vals;
};

// Left-looking incomplete Cholesky. fixed_pattern keeps the lower triangle of
// A and ignores droptol; otherwise fill is kept when |L(i,j)| >=
// droptol*||A(:,j)||_2/L(j,j), the classical drop rule stated on the
// unit-diagonal factor (diagonal always kept, droptol 0 gives the exact
// factor). On a nonpositive pivot the diagonal is shifted by
// sigma = 1e-3*max(diag A) doubled up to three times before failing.
CscLower ic_factor(const SparseMatrix& A, bool fixed_pattern, double droptol,
                   double* shift_used = nullptr);
Vector csc_lower_solve(const CscLower& L, Vector b);
Vector csc_lower_transpose_solve(const CscLower& L, Vector b);

PrecondPtr make_identity(int n);
PrecondPtr make_jacobi(const SparseMatrix& A);
PrecondPtr make_jacobi_vector(Vector d, std::string label);
PrecondPtr make_ic0(const SparseMatrix& A);
PrecondPtr make_ict(const SparseMatrix& A, double droptol);
// Exact inverse action: dense Cholesky up to dimension 4000, otherwise PCG to
// relative residual 1e-14 preconditioned with ict(1e-3).
PrecondPtr make_exact(const SparseMatrix& A);
PrecondPtr make_exact_dense(DenseMatrix M, std::string label);
PrecondPtr make_scaled_identity(int n, double c);
// Inverse of I + D for diagonal D.
PrecondPtr make_schur_identity_plus_d(const SparseMatrix& D);
// Inverse of the lumped pressure mass h^2*I.
PrecondPtr make_schur_pressure_mass(int m, double h);
// Truncated PCG on an SPD operator; tol 0 runs exactly max_inner steps.
PrecondPtr make_pcg_nonlinear(LinOp op, int n, PrecondPtr inner, double rel_tol,
                              int max_inner, std::string label);

// PCG from a zero start; stops at rel_tol, max_iters, or residual stagnation.
// Throws if the operator turns out indefinite on a search direction.
Vector pcg_solve_op(const LinOp& op, int n, const Vector& b, const PrecondPtr& inner,
                    double rel_tol, int max_iters, int* iters_out = nullptr);
Vector pcg_solve(const SparseMatrix& A, const Vector& b, const PrecondPtr& inner,
                 double rel_tol, int max_iters, int* iters_out = nullptr);

// Materialize an operator column by column with coordinate probes.
DenseMatrix assemble_dense_operator(const LinOp& op, int n);

}  // namespace uzawa
