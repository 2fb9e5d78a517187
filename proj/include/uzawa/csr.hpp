#pragma once

#include <vector>

#include "uzawa/vec.hpp"

namespace uzawa {

// Compressed sparse row; columns sorted and unique within each row,
// no stored zeros. Immutable after construction.
struct SparseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr;  // size rows+1
  std::vector<int> col_idx;
  std::vector<double> vals;

  int nnz() const { return static_cast<int>(col_idx.size()); }
  double at(int i, int j) const;
};

struct Triplet {
  int r;
  int c;
  double v;
};

SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> trips);
SparseMatrix identity(int n);
SparseMatrix diag_matrix(const Vector& d);
// tridiagonal with constant bands (lo, di, up), size n
SparseMatrix tridiag(int n, double lo, double di, double up);

Vector matvec(const SparseMatrix& M, const Vector& v);
Vector matvec_transpose(const SparseMatrix& M, const Vector& v);

SparseMatrix transpose(const SparseMatrix& M);
SparseMatrix kron(const SparseMatrix& M, const SparseMatrix& N);
SparseMatrix add(const SparseMatrix& A, const SparseMatrix& B);
SparseMatrix scale(const SparseMatrix& M, double a);
SparseMatrix block_diag(const SparseMatrix& A, const SparseMatrix& B);
SparseMatrix vstack(const SparseMatrix& A, const SparseMatrix& B);
SparseMatrix symmetric_part(const SparseMatrix& M);  // (M + Mt)/2

Vector diag_of(const SparseMatrix& M);
double max_abs(const SparseMatrix& M);
// max entrywise |M - Mt|
double asymmetry(const SparseMatrix& M);
// 2-norms of every column
Vector column_norms(const SparseMatrix& M);

}  // namespace uzawa
