#include "uzawa/dense.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>

namespace uzawa {

DenseMatrix dense_of(const SparseMatrix& M) {
  DenseMatrix out(M.rows, M.cols);
  for (int i = 0; i < M.rows; ++i)
    for (int k = M.row_ptr[i]; k < M.row_ptr[i + 1]; ++k)
      out.at(i, M.col_idx[k]) += M.vals[k];
  return out;
}

DenseMatrix dense_identity(int n) {
  DenseMatrix out(n, n);
  for (int i = 0; i < n; ++i) out.at(i, i) = 1.0;
  return out;
}

DenseMatrix matmul(const DenseMatrix& A, const DenseMatrix& B) {
  require(A.cols == B.rows, "matmul: inner dimensions differ");
  DenseMatrix out(A.rows, B.cols);
  for (int i = 0; i < A.rows; ++i)
    for (int k = 0; k < A.cols; ++k) {
      const double aik = A.at(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < B.cols; ++j) out.at(i, j) += aik * B.at(k, j);
    }
  return out;
}

DenseMatrix transpose(const DenseMatrix& M) {
  DenseMatrix out(M.cols, M.rows);
  for (int i = 0; i < M.rows; ++i)
    for (int j = 0; j < M.cols; ++j) out.at(j, i) = M.at(i, j);
  return out;
}

Vector matvec(const DenseMatrix& M, const Vector& v) {
  require(static_cast<int>(v.size()) == M.cols, "dense matvec: dimension mismatch");
  Vector out(M.rows, 0.0);
  for (int i = 0; i < M.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < M.cols; ++j) s += M.at(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

double max_abs(const DenseMatrix& M) {
  double m = 0.0;
  for (double x : M.a) m = std::max(m, std::fabs(x));
  return m;
}

DenseMatrix dsub(const DenseMatrix& A, const DenseMatrix& B) {
  require(A.rows == B.rows && A.cols == B.cols, "dsub: dimension mismatch");
  DenseMatrix out(A.rows, A.cols);
  for (std::size_t k = 0; k < A.a.size(); ++k) out.a[k] = A.a[k] - B.a[k];
  return out;
}

namespace {

double off_diag_frobenius(const DenseMatrix& A) {
  double s = 0.0;
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j)
      if (i != j) s += A.at(i, j) * A.at(i, j);
  return std::sqrt(s);
}

double frobenius(const DenseMatrix& A) {
  double s = 0.0;
  for (double x : A.a) s += x * x;
  return std::sqrt(s);
}

}  // namespace

EigenPairs sym_eig(const DenseMatrix& M) {
  require(M.rows == M.cols, "sym_eig: matrix not square");
  require(M.rows <= 4000, "sym_eig: size exceeds dense limit");
  const int n = M.rows;
  const double scale = std::max(1.0, max_abs(M));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      require(std::fabs(M.at(i, j) - M.at(j, i)) <= 1e-12 * scale, "sym_eig: matrix not symmetric");

  DenseMatrix A = M;
  DenseMatrix Q = dense_identity(n);
  const double norm = std::max(frobenius(M), 1e-300);
  const double threshold = 1e-14 * norm;

  bool converged = false;
  for (int sweep = 0; sweep < 100; ++sweep) {
    if (off_diag_frobenius(A) <= threshold) {
      converged = true;
      break;
    }
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = A.at(p, q);
        if (apq == 0.0) continue;
        const double theta = (A.at(q, q) - A.at(p, p)) / (2.0 * apq);
        double t;
        if (std::fabs(theta) > 1e154) {
          t = 1.0 / (2.0 * theta);
        } else {
          t = 1.0 / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double app = A.at(p, p), aqq = A.at(q, q);
        A.at(p, p) = app - t * apq;
        A.at(q, q) = aqq + t * apq;
        A.at(p, q) = 0.0;
        A.at(q, p) = 0.0;
        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = A.at(k, p), akq = A.at(k, q);
          A.at(k, p) = c * akp - s * akq;
          A.at(p, k) = A.at(k, p);
          A.at(k, q) = s * akp + c * akq;
          A.at(q, k) = A.at(k, q);
        }
        for (int k = 0; k < n; ++k) {
          const double qkp = Q.at(k, p), qkq = Q.at(k, q);
          Q.at(k, p) = c * qkp - s * qkq;
          Q.at(k, q) = s * qkp + c * qkq;
        }
      }
    }
  }
  if (!converged && off_diag_frobenius(A) > threshold)
    throw std::runtime_error("sym_eig: Jacobi sweeps did not converge");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return A.at(i, i) < A.at(j, j); });

  EigenPairs out;
  out.values.resize(n);
  out.vectors = DenseMatrix(n, n);
  for (int k = 0; k < n; ++k) {
    out.values[k] = A.at(order[k], order[k]);
    for (int i = 0; i < n; ++i) out.vectors.at(i, k) = Q.at(i, order[k]);
  }
  return out;
}

namespace {

DenseMatrix spectral_function(const DenseMatrix& M, double (*f)(double)) {
  EigenPairs ep = sym_eig(M);
  const int n = M.rows;
  const double top = ep.values.empty() ? 0.0 : ep.values.back();
  require(!ep.values.empty() && ep.values.front() > 1e-13 * std::max(top, 1e-300),
          "spectral function: matrix is not positive definite");
  DenseMatrix out(n, n);
  for (int k = 0; k < n; ++k) {
    const double fk = f(ep.values[k]);
    for (int i = 0; i < n; ++i) {
      const double w = fk * ep.vectors.at(i, k);
      for (int j = 0; j < n; ++j) out.at(i, j) += w * ep.vectors.at(j, k);
    }
  }
  return out;
}

double fsqrt(double x) { return std::sqrt(x); }
double finvsqrt(double x) { return 1.0 / std::sqrt(x); }

}  // namespace

DenseMatrix sym_sqrt(const DenseMatrix& M) { return spectral_function(M, fsqrt); }

DenseMatrix sym_inv_sqrt(const DenseMatrix& M) { return spectral_function(M, finvsqrt); }

Svd svd_rect(const DenseMatrix& M) {
  require(M.rows <= M.cols, "svd_rect: requires rows <= cols");
  const int m = M.rows, n = M.cols;
  DenseMatrix C(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += M.at(i, k) * M.at(j, k);
      C.at(i, j) = s;
      C.at(j, i) = s;
    }
  EigenPairs ep = sym_eig(C);

  Svd out;
  out.U = DenseMatrix(m, m);
  out.sigma.resize(m);
  out.V = DenseMatrix(n, n);
  // Eigenvalues of M*Mt below the Gram accuracy floor are numerically zero.
  const double lam_max = ep.values.empty() ? 0.0 : std::max(0.0, ep.values.back());
  const double lam_cut = lam_max * 1e-14 * m;
  for (int k = 0; k < m; ++k) {
    const int src = m - 1 - k;  // descending
    const double lam = std::max(0.0, ep.values[src]);
    out.sigma[k] = lam <= lam_cut ? 0.0 : std::sqrt(lam);
    for (int i = 0; i < m; ++i) out.U.at(i, k) = ep.vectors.at(i, src);
  }

  int filled = 0;
  for (int k = 0; k < m; ++k) {
    if (out.sigma[k] == 0.0) break;
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int i = 0; i < m; ++i) s += M.at(i, j) * out.U.at(i, k);
      out.V.at(j, k) = s / out.sigma[k];
    }
    ++filled;
  }
  // Complete V to an orthonormal basis; double Gram-Schmidt keeps candidates
  // orthogonal even when little of them survives the projection.
  const auto try_candidate = [&](Vector cand, double floor) {
    for (int pass = 0; pass < 2; ++pass)
      for (int k = 0; k < filled; ++k) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += cand[j] * out.V.at(j, k);
        for (int j = 0; j < n; ++j) cand[j] -= s * out.V.at(j, k);
      }
    const double nv = norm2(cand);
    if (nv < floor) return false;
    for (int j = 0; j < n; ++j) out.V.at(j, filled) = cand[j] / nv;
    ++filled;
    return true;
  };
  for (const double floor : {0.5, 1e-2}) {
    for (int e = 0; e < n && filled < n; ++e) {
      Vector cand(n, 0.0);
      cand[e] = 1.0;
      try_candidate(std::move(cand), floor);
    }
  }
  Rng rng(0x5bd1e995u);
  for (int attempt = 0; attempt < 1000 && filled < n; ++attempt)
    try_candidate(rng.gaussian_vector(n), 0.1);
  require(filled == n, "svd_rect: failed to complete orthonormal basis");
  return out;
}

double spectral_norm(const DenseMatrix& M) {
  if (M.rows == 0 || M.cols == 0) return 0.0;
  const Svd s = M.rows <= M.cols ? svd_rect(M) : svd_rect(transpose(M));
  return s.sigma[0];
}

DenseMatrix chol(const DenseMatrix& M) {
  require(M.rows == M.cols, "chol: matrix not square");
  const int n = M.rows;
  DenseMatrix L(n, n);
  for (int j = 0; j < n; ++j) {
    double d = M.at(j, j);
    for (int k = 0; k < j; ++k) d -= L.at(j, k) * L.at(j, k);
    if (!(d > 0.0)) throw std::runtime_error("chol: matrix not SPD");
    const double ljj = std::sqrt(d);
    L.at(j, j) = ljj;
    for (int i = j + 1; i < n; ++i) {
      double s = M.at(i, j);
      for (int k = 0; k < j; ++k) s -= L.at(i, k) * L.at(j, k);
      L.at(i, j) = s / ljj;
    }
  }
  return L;
}

Vector lower_solve(const DenseMatrix& L, const Vector& b) {
  require(static_cast<int>(b.size()) == L.rows, "lower_solve: dimension mismatch");
  const int n = L.rows;
  Vector x(b);
  for (int i = 0; i < n; ++i) {
    double s = x[i];
    for (int k = 0; k < i; ++k) s -= L.at(i, k) * x[k];
    x[i] = s / L.at(i, i);
  }
  return x;
}

Vector lower_transpose_solve(const DenseMatrix& L, const Vector& b) {
  require(static_cast<int>(b.size()) == L.rows, "lower_transpose_solve: dimension mismatch");
  const int n = L.rows;
  Vector x(b);
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (int k = i + 1; k < n; ++k) s -= L.at(k, i) * x[k];
    x[i] = s / L.at(i, i);
  }
  return x;
}

Vector chol_solve(const DenseMatrix& L, const Vector& b) {
  return lower_transpose_solve(L, lower_solve(L, b));
}

Lu lu_factor(DenseMatrix M) {
  require(M.rows == M.cols, "lu_factor: matrix not square");
  const int n = M.rows;
  Lu f;
  f.piv.resize(n);
  for (int j = 0; j < n; ++j) {
    int p = j;
    double best = std::fabs(M.at(j, j));
    for (int i = j + 1; i < n; ++i) {
      const double v = std::fabs(M.at(i, j));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best == 0.0) throw std::runtime_error("lu_factor: matrix is singular");
    f.piv[j] = p;
    if (p != j)
      for (int k = 0; k < n; ++k) std::swap(M.at(j, k), M.at(p, k));
    const double pivot = M.at(j, j);
    for (int i = j + 1; i < n; ++i) {
      const double l = M.at(i, j) / pivot;
      M.at(i, j) = l;
      for (int k = j + 1; k < n; ++k) M.at(i, k) -= l * M.at(j, k);
    }
  }
  f.lu = std::move(M);
  return f;
}

Vector lu_solve(const Lu& f, Vector b) {
  const int n = f.lu.rows;
  require(static_cast<int>(b.size()) == n, "lu_solve: dimension mismatch");
  for (int j = 0; j < n; ++j)
    if (f.piv[j] != j) std::swap(b[j], b[f.piv[j]]);
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= f.lu.at(i, k) * b[k];
    b[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int k = i + 1; k < n; ++k) s -= f.lu.at(i, k) * b[k];
    b[i] = s / f.lu.at(i, i);
  }
  return b;
}

}  // namespace uzawa
