#include "uzawa/precond.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace uzawa {

namespace {

bool ic_attempt(const SparseMatrix& A, bool fixed_pattern, double droptol, double shift,
                const Vector& colnorm, CscLower& L) {
  const int n = A.rows;
  L.n = n;
  L.col_ptr.assign(1, 0);
  L.row_idx.clear();
  L.vals.clear();

  Vector w(n, 0.0);
  std::vector<char> inpat(n, 0);
  std::vector<int> pattern;
  std::vector<int> list_head(n, -1);  // columns whose next unprocessed row is this row
  std::vector<int> next_col(n, -1);
  std::vector<int> col_pos(n, 0);

  for (int j = 0; j < n; ++j) {
    pattern.clear();
    for (int p = A.row_ptr[j]; p < A.row_ptr[j + 1]; ++p) {
      const int i = A.col_idx[p];
      if (i < j) continue;
      w[i] = A.vals[p];
      inpat[i] = 1;
      pattern.push_back(i);
    }
    if (!inpat[j]) {
      w[j] = 0.0;
      inpat[j] = 1;
      pattern.push_back(j);
    }
    w[j] += shift;

    int k = list_head[j];
    list_head[j] = -1;
    while (k != -1) {
      const int knext = next_col[k];
      int p = col_pos[k];
      const double ljk = L.vals[p];
      for (int q = p; q < L.col_ptr[k + 1]; ++q) {
        const int i = L.row_idx[q];
        if (fixed_pattern) {
          if (inpat[i]) w[i] -= ljk * L.vals[q];
        } else {
          if (!inpat[i]) {
            inpat[i] = 1;
            pattern.push_back(i);
            w[i] = 0.0;
          }
          w[i] -= ljk * L.vals[q];
        }
      }
      ++p;
      col_pos[k] = p;
      if (p < L.col_ptr[k + 1]) {
        const int r = L.row_idx[p];
        next_col[k] = list_head[r];
        list_head[r] = k;
      }
      k = knext;
    }

    const double d = w[j];
    if (!(d > 0.0)) {
      for (int i : pattern) {
        w[i] = 0.0;
        inpat[i] = 0;
      }
      return false;
    }
    const double ljj = std::sqrt(d);
    std::sort(pattern.begin(), pattern.end());
    L.row_idx.push_back(j);
    L.vals.push_back(ljj);
    // Classical incomplete-LU dropping thresholds the unit-diagonal factor,
    // so the Cholesky-factor cutoff carries a 1/L(j,j); keeping the pivot
    // scale out of the test makes the rule invariant under A -> c*A.
    const double tau = droptol * colnorm[j] / ljj;
    for (int i : pattern) {
      if (i == j) continue;
      const double lij = w[i] / ljj;
      if (fixed_pattern || std::fabs(lij) >= tau) {
        L.row_idx.push_back(i);
        L.vals.push_back(lij);
      }
    }
    for (int i : pattern) {
      w[i] = 0.0;
      inpat[i] = 0;
    }
    L.col_ptr.push_back(static_cast<int>(L.row_idx.size()));

    const int start = L.col_ptr[j] + 1;  // first off-diagonal entry
    col_pos[j] = start;
    if (start < L.col_ptr[j + 1]) {
      const int r = L.row_idx[start];
      next_col[j] = list_head[r];
      list_head[r] = j;
    }
  }
  return true;
}

}  // namespace

CscLower ic_factor(const SparseMatrix& A, bool fixed_pattern, double droptol,
                   double* shift_used) {
  require(A.rows == A.cols, "ic_factor: matrix not square");
  require(A.rows > 0, "ic_factor: empty matrix");
  require(droptol >= 0.0, "ic_factor: negative droptol");

  const Vector colnorm = column_norms(A);
  const Vector d = diag_of(A);
  double maxdiag = 0.0;
  for (double x : d) maxdiag = std::max(maxdiag, std::fabs(x));
  const double sigma = 1e-3 * std::max(maxdiag, 1e-300);

  CscLower L;
  double shift = 0.0;
  for (int attempt = 0; attempt < 5; ++attempt) {
    if (ic_attempt(A, fixed_pattern, droptol, shift, colnorm, L)) {
      if (shift_used) *shift_used = shift;
      return L;
    }
    shift = attempt == 0 ? sigma : 2.0 * shift;
  }
  throw std::runtime_error("ic_factor: breakdown persists after shifted retries");
}

Vector csc_lower_solve(const CscLower& L, Vector b) {
  require(static_cast<int>(b.size()) == L.n, "csc_lower_solve: dimension mismatch");
  for (int j = 0; j < L.n; ++j) {
    const int p0 = L.col_ptr[j];
    const double xj = b[j] / L.vals[p0];
    b[j] = xj;
    for (int p = p0 + 1; p < L.col_ptr[j + 1]; ++p) b[L.row_idx[p]] -= L.vals[p] * xj;
  }
  return b;
}

Vector csc_lower_transpose_solve(const CscLower& L, Vector b) {
  require(static_cast<int>(b.size()) == L.n, "csc_lower_transpose_solve: dimension mismatch");
  for (int j = L.n - 1; j >= 0; --j) {
    const int p0 = L.col_ptr[j];
    double s = b[j];
    for (int p = p0 + 1; p < L.col_ptr[j + 1]; ++p) s -= L.vals[p] * b[L.row_idx[p]];
    b[j] = s / L.vals[p0];
  }
  return b;
}

namespace {

class IdentityPrecond final : public Precond {
 public:
  explicit IdentityPrecond(int n) : n_(n) {}
  Vector apply(const Vector& v) const override {
    require(static_cast<int>(v.size()) == n_, "identity: dimension mismatch");
    return v;
  }
  int dim() const override { return n_; }
  std::string name() const override { return "identity"; }

 private:
  int n_;
};

class DiagPrecond final : public Precond {
 public:
  DiagPrecond(Vector inv_d, std::string label) : inv_d_(std::move(inv_d)), label_(std::move(label)) {}
  Vector apply(const Vector& v) const override {
    require(v.size() == inv_d_.size(), "diag precond: dimension mismatch");
    Vector out(v);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= inv_d_[i];
    return out;
  }
  int dim() const override { return static_cast<int>(inv_d_.size()); }
  std::string name() const override { return label_; }

 private:
  Vector inv_d_;
  std::string label_;
};

class IcPrecond final : public Precond {
 public:
  IcPrecond(CscLower L, std::string label) : L_(std::move(L)), label_(std::move(label)) {}
  Vector apply(const Vector& v) const override {
    return csc_lower_transpose_solve(L_, csc_lower_solve(L_, v));
  }
  int dim() const override { return L_.n; }
  std::string name() const override { return label_; }

 private:
  CscLower L_;
  std::string label_;
};

class DenseCholPrecond final : public Precond {
 public:
  DenseCholPrecond(DenseMatrix L, std::string label) : L_(std::move(L)), label_(std::move(label)) {}
  Vector apply(const Vector& v) const override { return chol_solve(L_, v); }
  int dim() const override { return L_.rows; }
  std::string name() const override { return label_; }

 private:
  DenseMatrix L_;
  std::string label_;
};

class PcgExactPrecond final : public Precond {
 public:
  PcgExactPrecond(SparseMatrix A, PrecondPtr inner)
      : A_(std::move(A)), inner_(std::move(inner)) {}
  Vector apply(const Vector& v) const override {
    Vector x = pcg_solve(A_, v, inner_, 1e-14, 5 * A_.rows);
    const Vector r = vsub(matvec(A_, x), v);
    const double nb = norm2(v);
    if (nb > 0.0 && norm2(r) > 1e-10 * nb)
      throw std::runtime_error("exact: inner PCG failed to reach tolerance");
    return x;
  }
  int dim() const override { return A_.rows; }
  std::string name() const override { return "exact"; }

 private:
  SparseMatrix A_;
  PrecondPtr inner_;
};

class PcgNonlinearPrecond final : public Precond {
 public:
  PcgNonlinearPrecond(LinOp op, int n, PrecondPtr inner, double rel_tol, int max_inner,
                      std::string label)
      : op_(std::move(op)),
        n_(n),
        inner_(std::move(inner)),
        rel_tol_(rel_tol),
        max_inner_(max_inner),
        label_(std::move(label)) {}
  Vector apply(const Vector& v) const override {
    return pcg_solve_op(op_, n_, v, inner_, rel_tol_, max_inner_);
  }
  int dim() const override { return n_; }
  bool linear() const override { return false; }
  double delta() const override { return rel_tol_; }
  std::string name() const override { return label_; }

 private:
  LinOp op_;
  int n_;
  PrecondPtr inner_;
  double rel_tol_;
  int max_inner_;
  std::string label_;
};

}  // namespace

PrecondPtr make_identity(int n) { return std::make_shared<IdentityPrecond>(n); }

PrecondPtr make_jacobi(const SparseMatrix& A) {
  require(A.rows == A.cols, "jacobi: matrix not square");
  Vector d = diag_of(A);
  for (std::size_t i = 0; i < d.size(); ++i) {
    require(d[i] > 0.0, "jacobi: nonpositive diagonal entry");
    d[i] = 1.0 / d[i];
  }
  return std::make_shared<DiagPrecond>(std::move(d), "jacobi");
}

PrecondPtr make_jacobi_vector(Vector d, std::string label) {
  for (std::size_t i = 0; i < d.size(); ++i) {
    require(d[i] > 0.0, "jacobi: nonpositive diagonal entry");
    d[i] = 1.0 / d[i];
  }
  return std::make_shared<DiagPrecond>(std::move(d), std::move(label));
}

PrecondPtr make_ic0(const SparseMatrix& A) {
  return std::make_shared<IcPrecond>(ic_factor(A, true, 0.0), "ic0");
}

PrecondPtr make_ict(const SparseMatrix& A, double droptol) {
  return std::make_shared<IcPrecond>(ic_factor(A, false, droptol),
                                     "ict(" + std::to_string(droptol) + ")");
}

PrecondPtr make_exact(const SparseMatrix& A) {
  require(A.rows == A.cols, "exact: matrix not square");
  if (A.rows <= 4000) {
    DenseMatrix L = chol(dense_of(A));
    return std::make_shared<DenseCholPrecond>(std::move(L), "exact");
  }
  PrecondPtr inner = make_ict(A, 1e-3);
  return std::make_shared<PcgExactPrecond>(A, std::move(inner));
}

PrecondPtr make_exact_dense(DenseMatrix M, std::string label) {
  return std::make_shared<DenseCholPrecond>(chol(M), std::move(label));
}

PrecondPtr make_scaled_identity(int n, double c) {
  require(c > 0.0, "scaled identity: scale must be positive");
  Vector d(static_cast<std::size_t>(n), c);
  return std::make_shared<DiagPrecond>(Vector(static_cast<std::size_t>(n), 1.0 / c),
                                       "scaled-identity(" + std::to_string(c) + ")");
}

PrecondPtr make_schur_identity_plus_d(const SparseMatrix& D) {
  require(D.rows == D.cols, "identity-plus-D: D not square");
  Vector d(static_cast<std::size_t>(D.rows), 0.0);
  for (int i = 0; i < D.rows; ++i)
    for (int p = D.row_ptr[i]; p < D.row_ptr[i + 1]; ++p) {
      require(D.col_idx[p] == i, "identity-plus-D: D is not diagonal");
      d[i] = D.vals[p];
    }
  for (double& x : d) {
    require(1.0 + x > 0.0, "identity-plus-D: nonpositive diagonal");
    x = 1.0 / (1.0 + x);
  }
  return std::make_shared<DiagPrecond>(std::move(d), "identity-plus-D");
}

PrecondPtr make_schur_pressure_mass(int m, double h) {
  require(h > 0.0, "pressure-mass: mesh width must be positive");
  return std::make_shared<DiagPrecond>(Vector(static_cast<std::size_t>(m), 1.0 / (h * h)),
                                       "pressure-mass");
}

PrecondPtr make_pcg_nonlinear(LinOp op, int n, PrecondPtr inner, double rel_tol, int max_inner,
                              std::string label) {
  require(n > 0, "pcg_nonlinear: empty operator");
  require(rel_tol >= 0.0, "pcg_nonlinear: negative tolerance");
  require(max_inner >= 1, "pcg_nonlinear: need at least one step");
  if (!inner) inner = make_identity(n);
  return std::make_shared<PcgNonlinearPrecond>(std::move(op), n, std::move(inner), rel_tol,
                                               max_inner, std::move(label));
}

Vector pcg_solve_op(const LinOp& op, int n, const Vector& b, const PrecondPtr& inner,
                    double rel_tol, int max_iters, int* iters_out) {
  require(static_cast<int>(b.size()) == n, "pcg: dimension mismatch");
  Vector x(static_cast<std::size_t>(n), 0.0);
  if (iters_out) *iters_out = 0;
  const double nb = norm2(b);
  if (nb == 0.0) return x;

  Vector r(b);
  Vector z = inner ? inner->apply(r) : r;
  Vector p(z);
  double rz = dot(r, z);
  if (rz <= 0.0 && norm2(r) > 0.0)
    throw std::runtime_error("pcg: preconditioner not positive definite");

  // Stagnation window guards the exact-solve path against roundoff plateaus.
  constexpr int kWindow = 60;
  std::vector<double> recent;
  recent.reserve(kWindow + 1);

  for (int it = 1; it <= max_iters; ++it) {
    const Vector q = op(p);
    const double pq = dot(p, q);
    if (pq <= 0.0) throw std::runtime_error("pcg: operator not positive definite");
    const double alpha = rz / pq;
    axpy_inplace(alpha, p, x);
    axpy_inplace(-alpha, q, r);
    if (iters_out) *iters_out = it;
    const double nr = norm2(r);
    if (nr <= rel_tol * nb) break;
    if (static_cast<int>(recent.size()) >= kWindow && nr > 0.9 * recent.front()) break;
    recent.push_back(nr);
    if (static_cast<int>(recent.size()) > kWindow) recent.erase(recent.begin());
    z = inner ? inner->apply(r) : r;
    const double rz_new = dot(r, z);
    if (rz_new == 0.0) break;
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
  }
  return x;
}

Vector pcg_solve(const SparseMatrix& A, const Vector& b, const PrecondPtr& inner,
                 double rel_tol, int max_iters, int* iters_out) {
  return pcg_solve_op([&A](const Vector& v) { return matvec(A, v); }, A.rows, b, inner,
                      rel_tol, max_iters, iters_out);
}

DenseMatrix assemble_dense_operator(const LinOp& op, int n) {
  DenseMatrix M(n, n);
  Vector e(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    const Vector col = op(e);
    require(static_cast<int>(col.size()) == n, "assemble_dense_operator: operator not square");
    for (int i = 0; i < n; ++i) M.at(i, j) = col[i];
    e[j] = 0.0;
  }
  return M;
}

}  // namespace uzawa
