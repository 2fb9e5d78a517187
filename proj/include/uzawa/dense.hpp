#pragma once

#include <vector>

#include "uzawa/csr.hpp"
#include "uzawa/vec.hpp"

namespace uzawa {

struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;  // row-major

  DenseMatrix() = default;
  DenseMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

struct EigenPairs {
  Vector values;        // ascending
  DenseMatrix vectors;  // column k pairs with values[k]
};

struct Svd {
  DenseMatrix U;  // m by m
  Vector sigma;   // length m, descending, nonnegative
  DenseMatrix V;  // n by n
};

struct Lu {
  DenseMatrix lu;
  std::vector<int> piv;
};

DenseMatrix dense_of(const SparseMatrix& M);
DenseMatrix dense_identity(int n);
DenseMatrix matmul(const DenseMatrix& A, const DenseMatrix& B);
DenseMatrix transpose(const DenseMatrix& M);
Vector matvec(const DenseMatrix& M, const Vector& v);
double max_abs(const DenseMatrix& M);
DenseMatrix dsub(const DenseMatrix& A, const DenseMatrix& B);

// Cyclic Jacobi rotations; off-diagonal Frobenius threshold 1e-14*||M||_F,
// 100-sweep cap. Input must be symmetric within 1e-12 relative.
EigenPairs sym_eig(const DenseMatrix& M);
// Q diag(lam)^{+-1/2} Qt; requires min eigenvalue > 1e-13*max eigenvalue.
DenseMatrix sym_sqrt(const DenseMatrix& M);
DenseMatrix sym_inv_sqrt(const DenseMatrix& M);

// M (rows m <= cols n) = U [diag(sigma) 0] Vt, built from eigendecompositions
// of M*Mt with null-space completion of V.
Svd svd_rect(const DenseMatrix& M);
// Largest singular value of an arbitrary rectangular matrix.
double spectral_norm(const DenseMatrix& M);

// Lower-triangular L with M = L*Lt; throws "not SPD" on nonpositive pivot.
DenseMatrix chol(const DenseMatrix& M);
Vector chol_solve(const DenseMatrix& L, const Vector& b);
// Forward substitution L z = b and transposed solve Lt x = z.
Vector lower_solve(const DenseMatrix& L, const Vector& b);
Vector lower_transpose_solve(const DenseMatrix& L, const Vector& b);

Lu lu_factor(DenseMatrix M);
Vector lu_solve(const Lu& f, Vector b);

}  // namespace uzawa
