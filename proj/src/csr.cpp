#include "uzawa/csr.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>

namespace uzawa {

double SparseMatrix::at(int i, int j) const {
  require(i >= 0 && i < rows && j >= 0 && j < cols, "at: index out of range");
  const int b = row_ptr[i], e = row_ptr[i + 1];
  const auto it = std::lower_bound(col_idx.begin() + b, col_idx.begin() + e, j);
  if (it != col_idx.begin() + e && *it == j) return vals[it - col_idx.begin()];
  return 0.0;
}

SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> trips) {
  require(rows >= 0 && cols >= 0, "from_triplets: negative dims");
  for (const Triplet& t : trips)
    require(t.r >= 0 && t.r < rows && t.c >= 0 && t.c < cols,
            "from_triplets: index out of range");
  std::sort(trips.begin(), trips.end(), [](const Triplet& a, const Triplet& b) {
    return a.r != b.r ? a.r < b.r : a.c < b.c;
  });
  SparseMatrix M;
  M.rows = rows;
  M.cols = cols;
  M.row_ptr.assign(static_cast<std::size_t>(rows) + 1, 0);
  M.col_idx.reserve(trips.size());
  M.vals.reserve(trips.size());
  std::size_t i = 0;
  for (int r = 0; r < rows; ++r) {
    M.row_ptr[r] = static_cast<int>(M.col_idx.size());
    while (i < trips.size() && trips[i].r == r) {
      const int c = trips[i].c;
      double v = 0.0;
      while (i < trips.size() && trips[i].r == r && trips[i].c == c) v += trips[i++].v;
      if (v != 0.0) {
        M.col_idx.push_back(c);
        M.vals.push_back(v);
      }
    }
  }
  M.row_ptr[rows] = static_cast<int>(M.col_idx.size());
  return M;
}

SparseMatrix identity(int n) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(t));
}

SparseMatrix diag_matrix(const Vector& d) {
  std::vector<Triplet> t;
  t.reserve(d.size());
  for (int i = 0; i < static_cast<int>(d.size()); ++i) t.push_back({i, i, d[i]});
  return from_triplets(static_cast<int>(d.size()), static_cast<int>(d.size()), std::move(t));
}

SparseMatrix tridiag(int n, double lo, double di, double up) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(3 * n));
  for (int i = 0; i < n; ++i) {
    if (i > 0) t.push_back({i, i - 1, lo});
    t.push_back({i, i, di});
    if (i + 1 < n) t.push_back({i, i + 1, up});
  }
  return from_triplets(n, n, std::move(t));
}

Vector matvec(const SparseMatrix& M, const Vector& v) {
  require(M.cols == static_cast<int>(v.size()), "matvec: dimension mismatch");
  Vector out(static_cast<std::size_t>(M.rows), 0.0);
  for (int r = 0; r < M.rows; ++r) {
    double acc = 0.0;
    for (int k = M.row_ptr[r]; k < M.row_ptr[r + 1]; ++k) acc += M.vals[k] * v[M.col_idx[k]];
    out[r] = acc;
  }
  return out;
}

Vector matvec_transpose(const SparseMatrix& M, const Vector& v) {
  require(M.rows == static_cast<int>(v.size()), "matvec_transpose: dimension mismatch");
  Vector out(static_cast<std::size_t>(M.cols), 0.0);
  for (int r = 0; r < M.rows; ++r) {
    const double vr = v[r];
    if (vr == 0.0) continue;
    for (int k = M.row_ptr[r]; k < M.row_ptr[r + 1]; ++k) out[M.col_idx[k]] += M.vals[k] * vr;
  }
  return out;
}

SparseMatrix transpose(const SparseMatrix& M) {
  SparseMatrix T;
  T.rows = M.cols;
  T.cols = M.rows;
  T.row_ptr.assign(static_cast<std::size_t>(M.cols) + 1, 0);
  for (int k = 0; k < M.nnz(); ++k) T.row_ptr[M.col_idx[k] + 1]++;
  for (int c = 0; c < M.cols; ++c) T.row_ptr[c + 1] += T.row_ptr[c];
  T.col_idx.resize(M.col_idx.size());
  T.vals.resize(M.vals.size());
  std::vector<int> next(T.row_ptr.begin(), T.row_ptr.end() - 1);
  for (int r = 0; r < M.rows; ++r)
    for (int k = M.row_ptr[r]; k < M.row_ptr[r + 1]; ++k) {
      const int pos = next[M.col_idx[k]]++;
      T.col_idx[pos] = r;
      T.vals[pos] = M.vals[k];
    }
  return T;  // rows of M visited in order, so columns stay sorted
}

SparseMatrix kron(const SparseMatrix& M, const SparseMatrix& N) {
  require(M.rows > 0 && M.cols > 0 && N.rows > 0 && N.cols > 0, "kron: empty operand");
  const std::int64_t r64 = static_cast<std::int64_t>(M.rows) * N.rows;
  const std::int64_t c64 = static_cast<std::int64_t>(M.cols) * N.cols;
  require(r64 < (1LL << 31) && c64 < (1LL << 31), "kron: index range overflow");
  SparseMatrix K;
  K.rows = static_cast<int>(r64);
  K.cols = static_cast<int>(c64);
  K.row_ptr.assign(static_cast<std::size_t>(K.rows) + 1, 0);
  const std::size_t nnz_bound =
      static_cast<std::size_t>(M.nnz()) * static_cast<std::size_t>(N.nnz());
  K.col_idx.reserve(nnz_bound);
  K.vals.reserve(nnz_bound);
  for (int i = 0; i < M.rows; ++i)
    for (int k = 0; k < N.rows; ++k) {
      const int row = i * N.rows + k;
      K.row_ptr[row] = static_cast<int>(K.col_idx.size());
      for (int a = M.row_ptr[i]; a < M.row_ptr[i + 1]; ++a)
        for (int b = N.row_ptr[k]; b < N.row_ptr[k + 1]; ++b) {
          const double v = M.vals[a] * N.vals[b];
          if (v == 0.0) continue;
          K.col_idx.push_back(M.col_idx[a] * N.cols + N.col_idx[b]);
          K.vals.push_back(v);
        }
    }
  K.row_ptr[K.rows] = static_cast<int>(K.col_idx.size());
  return K;
}

SparseMatrix add(const SparseMatrix& A, const SparseMatrix& B) {
  require(A.rows == B.rows && A.cols == B.cols, "add: dimension mismatch");
  SparseMatrix C;
  C.rows = A.rows;
  C.cols = A.cols;
  C.row_ptr.assign(static_cast<std::size_t>(A.rows) + 1, 0);
  C.col_idx.reserve(A.col_idx.size() + B.col_idx.size());
  C.vals.reserve(A.col_idx.size() + B.col_idx.size());
  for (int r = 0; r < A.rows; ++r) {
    C.row_ptr[r] = static_cast<int>(C.col_idx.size());
    int a = A.row_ptr[r], b = B.row_ptr[r];
    const int ae = A.row_ptr[r + 1], be = B.row_ptr[r + 1];
    while (a < ae || b < be) {
      int c;
      double v;
      if (b >= be || (a < ae && A.col_idx[a] < B.col_idx[b])) {
        c = A.col_idx[a];
        v = A.vals[a++];
      } else if (a >= ae || B.col_idx[b] < A.col_idx[a]) {
        c = B.col_idx[b];
        v = B.vals[b++];
      } else {
        c = A.col_idx[a];
        v = A.vals[a++] + B.vals[b++];
      }
      if (v != 0.0) {
        C.col_idx.push_back(c);
        C.vals.push_back(v);
      }
    }
  }
  C.row_ptr[A.rows] = static_cast<int>(C.col_idx.size());
  return C;
}

SparseMatrix scale(const SparseMatrix& M, double a) {
  if (a == 0.0) return from_triplets(M.rows, M.cols, {});
  SparseMatrix S = M;
  for (double& v : S.vals) v *= a;
  return S;
}

SparseMatrix block_diag(const SparseMatrix& A, const SparseMatrix& B) {
  SparseMatrix C;
  C.rows = A.rows + B.rows;
  C.cols = A.cols + B.cols;
  C.row_ptr.assign(static_cast<std::size_t>(C.rows) + 1, 0);
  C.col_idx.reserve(A.col_idx.size() + B.col_idx.size());
  C.vals.reserve(A.col_idx.size() + B.col_idx.size());
  for (int r = 0; r < A.rows; ++r) {
    C.row_ptr[r] = static_cast<int>(C.col_idx.size());
    for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) {
      C.col_idx.push_back(A.col_idx[k]);
      C.vals.push_back(A.vals[k]);
    }
  }
  for (int r = 0; r < B.rows; ++r) {
    C.row_ptr[A.rows + r] = static_cast<int>(C.col_idx.size());
    for (int k = B.row_ptr[r]; k < B.row_ptr[r + 1]; ++k) {
      C.col_idx.push_back(A.cols + B.col_idx[k]);
      C.vals.push_back(B.vals[k]);
    }
  }
  C.row_ptr[C.rows] = static_cast<int>(C.col_idx.size());
  return C;
}

SparseMatrix vstack(const SparseMatrix& A, const SparseMatrix& B) {
  require(A.cols == B.cols, "vstack: column mismatch");
  SparseMatrix C;
  C.rows = A.rows + B.rows;
  C.cols = A.cols;
  C.row_ptr.reserve(static_cast<std::size_t>(C.rows) + 1);
  C.row_ptr = A.row_ptr;
  C.row_ptr.pop_back();
  const int off = A.nnz();
  for (int r = 0; r <= B.rows; ++r) C.row_ptr.push_back(B.row_ptr[r] + off);
  C.col_idx = A.col_idx;
  C.col_idx.insert(C.col_idx.end(), B.col_idx.begin(), B.col_idx.end());
  C.vals = A.vals;
  C.vals.insert(C.vals.end(), B.vals.begin(), B.vals.end());
  return C;
}

SparseMatrix symmetric_part(const SparseMatrix& M) {
  require(M.rows == M.cols, "symmetric_part: not square");
  return add(scale(M, 0.5), scale(transpose(M), 0.5));
}

Vector diag_of(const SparseMatrix& M) {
  require(M.rows == M.cols, "diag_of: not square");
  Vector d(static_cast<std::size_t>(M.rows), 0.0);
  for (int r = 0; r < M.rows; ++r)
    for (int k = M.row_ptr[r]; k < M.row_ptr[r + 1]; ++k)
      if (M.col_idx[k] == r) d[r] = M.vals[k];
  return d;
}

double max_abs(const SparseMatrix& M) {
  double mx = 0.0;
  for (double v : M.vals) mx = std::max(mx, std::abs(v));
  return mx;
}

double asymmetry(const SparseMatrix& M) {
  const SparseMatrix R = add(M, scale(transpose(M), -1.0));
  return max_abs(R);
}

Vector column_norms(const SparseMatrix& M) {
  Vector s(static_cast<std::size_t>(M.cols), 0.0);
  for (int k = 0; k < M.nnz(); ++k) s[M.col_idx[k]] += M.vals[k] * M.vals[k];
  for (double& x : s) x = std::sqrt(x);
  return s;
}

}  // namespace uzawa
