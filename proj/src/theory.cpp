#include "uzawa/theory.hpp"

#include <algorithm>
#include <cmath>

#include "uzawa/dense.hpp"

namespace uzawa {

namespace {

DenseMatrix symmetrized(const DenseMatrix& M) {
  require(M.rows == M.cols, "symmetrized: matrix must be square");
  DenseMatrix R(M.rows, M.cols);
  for (int i = 0; i < M.rows; ++i)
    for (int j = 0; j < M.cols; ++j) R.at(i, j) = 0.5 * (M.at(i, j) + M.at(j, i));
  return R;
}

DenseMatrix assemble_precond(const Precond& pc) {
  const int n = pc.dim();
  DenseMatrix M(n, n);
  Vector e(n, 0.0);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    const Vector col = pc.apply(e);
    e[j] = 0.0;
    for (int i = 0; i < n; ++i) M.at(i, j) = col[i];
  }
  return symmetrized(M);
}

// Columns of A^{-1} B through one Cholesky factorization of A.
DenseMatrix ainv_times(const DenseMatrix& L, const DenseMatrix& B) {
  DenseMatrix X(B.rows, B.cols);
  Vector col(B.rows);
  for (int j = 0; j < B.cols; ++j) {
    for (int i = 0; i < B.rows; ++i) col[i] = B.at(i, j);
    const Vector x = chol_solve(L, col);
    for (int i = 0; i < B.rows; ++i) X.at(i, j) = x[i];
  }
  return X;
}

struct PencilExtremes {
  double lo = 0.0, hi = 0.0;
};

// Extreme generalized eigenvalues of (M, N) for SPD N, via W M W with
// W = N^{-1/2} supplied by the caller in whichever form is available.
PencilExtremes pencil_extremes(const DenseMatrix& W, const DenseMatrix& M) {
  const EigenPairs ep = sym_eig(symmetrized(matmul(W, matmul(M, W))));
  return {ep.values.front(), ep.values.back()};
}

}  // namespace

TheoryWorkspace build_workspace(const SaddleProblem& P, const PrecondPtr& ahat,
                                const PrecondPtr& shat) {
  validate(P);
  require(P.symmetric_a, "theory: A must be symmetric for the spectral workspace");
  require(P.n() <= 1500, "theory: dense analysis is limited to n <= 1500");
  require(ahat && ahat->dim() == P.n(), "theory: Ahat dimension mismatch");
  require(shat && shat->dim() == P.m(), "theory: Shat dimension mismatch");

  TheoryWorkspace ws;
  ws.n = P.n();
  ws.m = P.m();

  ws.A = symmetrized(dense_of(P.A));
  ws.Asqrt = sym_sqrt(ws.A);
  ws.Ainvsqrt = sym_inv_sqrt(ws.A);
  ws.Ahat_inv = assemble_precond(*ahat);
  ws.Shat_inv = assemble_precond(*shat);

  const DenseMatrix Bd = dense_of(P.B);
  const DenseMatrix Dd = symmetrized(dense_of(P.D));
  const DenseMatrix Bt = transpose(Bd);

  const DenseMatrix M0 = symmetrized(matmul(Bt, matmul(ws.Ahat_inv, Bd)));
  ws.H = M0;
  for (int i = 0; i < ws.m; ++i)
    for (int j = 0; j < ws.m; ++j) ws.H.at(i, j) += Dd.at(i, j);
  ws.H = symmetrized(ws.H);
  ws.Hsqrt = sym_sqrt(ws.H);
  ws.Hinvsqrt = sym_inv_sqrt(ws.H);

  const DenseMatrix La = chol(ws.A);
  const DenseMatrix M1 = symmetrized(matmul(Bt, ainv_times(La, Bd)));
  ws.S = M1;
  for (int i = 0; i < ws.m; ++i)
    for (int j = 0; j < ws.m; ++j) ws.S.at(i, j) += Dd.at(i, j);
  ws.S = symmetrized(ws.S);
  ws.Ssqrt = sym_sqrt(ws.S);
  ws.R = chol(ws.S);
  ws.Rt = transpose(ws.R);

  const Svd sv = svd_rect(matmul(Bt, ws.Ainvsqrt));
  ws.U = sv.U;
  ws.sigma = sv.sigma;

  TheoryReport& c = ws.consts;
  {
    const DenseMatrix Wa = sym_sqrt(ws.Ahat_inv);  // Ahat^{-1/2}
    const PencilExtremes pa = pencil_extremes(Wa, ws.A);
    c.lambda_raw = pa.lo;
    c.lambda0_raw = pa.hi;
    require(c.lambda_raw > 0.0, "theory: pencil (A, Ahat) is not positive");
    const double scale = std::sqrt(c.lambda_raw * c.lambda0_raw);
    c.lambda = c.lambda_raw / scale;
    c.lambda0 = c.lambda0_raw / scale;
    c.kappa1 = c.lambda0_raw / c.lambda_raw;
    c.alpha = (c.kappa1 - 1.0) / (c.kappa1 + 1.0);
  }
  {
    const DenseMatrix Ws = sym_sqrt(ws.Shat_inv);  // Shat^{-1/2}
    const PencilExtremes ph = pencil_extremes(Ws, ws.H);
    require(ph.lo > 0.0, "theory: pencil (H, Shat) is not positive");
    c.kappa2 = ph.hi / ph.lo;
    c.beta = (c.kappa2 - 1.0) / (c.kappa2 + 1.0);
  }
  {
    const EigenPairs ed = sym_eig(Dd);
    const double dmax = std::max(std::abs(ed.values.front()), std::abs(ed.values.back()));
    c.c0_finite = dmax > 0.0 && ed.values.front() > 1e-12 * dmax;
    if (c.c0_finite) {
      const DenseMatrix Wd = sym_inv_sqrt(Dd);
      c.c0 = pencil_extremes(Wd, M0).hi;
      c.delta1 = (c.lambda0_raw + c.c0) / (c.lambda0_raw * (1.0 + c.c0));
      c.delta2 = (c.lambda_raw + c.c0) / (c.lambda_raw * (1.0 + c.c0));
    } else {
      c.c0 = 0.0;
      c.delta1 = 1.0 / c.lambda0_raw;
      c.delta2 = 1.0 / c.lambda_raw;
    }
  }
  {
    const EigenPairs e0 = sym_eig(M0);
    c.gamma_finite = e0.values.back() > 0.0 && e0.values.front() > 1e-10 * e0.values.back();
    if (c.gamma_finite) {
      const DenseMatrix Wm = sym_inv_sqrt(M0);
      const PencilExtremes pg = pencil_extremes(Wm, M1);
      c.gamma1 = pg.hi;
      c.gamma2 = pg.lo;
    }
  }
  return ws;
}

TheoryReport constants(const SaddleProblem& P, const PrecondPtr& ahat, const PrecondPtr& shat) {
  return build_workspace(P, ahat, shat).consts;
}

double alpha_i(const TheoryWorkspace& ws, const Vector& f_i, double omega) {
  require(static_cast<int>(f_i.size()) == ws.n, "alpha_i: residual dimension mismatch");
  const Vector u = matvec(ws.Ainvsqrt, f_i);
  const double nu = norm2(u);
  if (nu == 0.0) return 0.0;
  const Vector t = matvec(ws.Asqrt, matvec(ws.Ahat_inv, matvec(ws.Asqrt, u)));
  Vector v = u;
  axpy_inplace(-omega, t, v);
  return norm2(v) / nu;
}

BetaGi beta_i_and_gi_spectrum(const TheoryWorkspace& ws, const Vector& g_i, double tauhat) {
  require(static_cast<int>(g_i.size()) == ws.m, "beta_i: residual dimension mismatch");
  const int m = ws.m;
  BetaGi out;

  const Vector u = matvec(ws.Hinvsqrt, g_i);
  const Vector s = matvec(ws.Shat_inv, g_i);
  const Vector v = matvec(ws.Hsqrt, scaled(s, tauhat));
  const double nu = norm2(u);
  require(nu > 0.0, "beta_i: zero residual");
  const Vector w = vsub(v, u);
  out.beta_i = norm2(w) / nu;
  require(out.beta_i < 1.0, "beta_i: relaxation is not a contraction in the H norm");

  // G_i^{-1} = H^{-1/2} (I + T) H^{-1/2} with T symmetric, T u = w and
  // ||T|| = |w|/|u|; built on span{u, w}.
  const Vector uhat = scaled(u, 1.0 / nu);
  const double a = dot(w, uhat);
  Vector p = w;
  axpy_inplace(-a, uhat, p);
  const double np = norm2(p);

  DenseMatrix T(m, m);
  if (np <= 1e-13 * std::max(norm2(w), 1e-300)) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) T.at(i, j) = (a / nu) * uhat[i] * uhat[j];
  } else {
    const Vector phat = scaled(p, 1.0 / np);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        T.at(i, j) = (a / nu) * (uhat[i] * uhat[j] - phat[i] * phat[j]) +
                     (np / nu) * (uhat[i] * phat[j] + phat[i] * uhat[j]);
  }
  DenseMatrix inner = dense_identity(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) inner.at(i, j) += T.at(i, j);
  out.gi_inv = symmetrized(matmul(ws.Hinvsqrt, matmul(inner, ws.Hinvsqrt)));

  {
    const EigenPairs ep = sym_eig(symmetrized(matmul(ws.Ssqrt, matmul(out.gi_inv, ws.Ssqrt))));
    out.abstract_lo = ep.values.front();
    out.abstract_hi = ep.values.back();
  }
  {
    DenseMatrix conc(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) conc.at(i, j) = tauhat * ws.Shat_inv.at(i, j);
    const EigenPairs ep = sym_eig(symmetrized(matmul(ws.Ssqrt, matmul(conc, ws.Ssqrt))));
    out.concrete_lo = ep.values.front();
    out.concrete_hi = ep.values.back();
  }
  return out;
}

DenseMatrix build_fi(const TheoryWorkspace& ws, const DenseMatrix& qi_inv, double alpha) {
  const int m = ws.m;
  require(qi_inv.rows == m && qi_inv.cols == m, "build_fi: Q dimension mismatch");
  require(alpha >= 0.0 && alpha < 1.0, "build_fi: alpha out of range");
  const double sa = std::sqrt(alpha);

  const DenseMatrix Ut = transpose(ws.U);
  const DenseMatrix QU = matmul(qi_inv, ws.U);
  const DenseMatrix P1 = matmul(Ut, QU);                    // Ut Q^{-1} U
  const DenseMatrix P2 = matmul(Ut, matmul(qi_inv, ws.R));  // Ut Q^{-1} R
  const DenseMatrix P3 = matmul(ws.Rt, matmul(qi_inv, ws.R));

  DenseMatrix F(2 * m, 2 * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      F.at(i, j) = alpha * ((i == j ? 1.0 : 0.0) + ws.sigma[i] * P1.at(i, j) * ws.sigma[j]);
      F.at(i, m + j) = sa * ws.sigma[i] * P2.at(i, j);
      F.at(m + j, i) = F.at(i, m + j);
      F.at(m + i, m + j) = P3.at(i, j) - (i == j ? 1.0 : 0.0);
    }
  return symmetrized(F);
}

ContractionCheck contraction_check(const DenseMatrix& fi) {
  const EigenPairs ep = sym_eig(fi);
  ContractionCheck out;
  out.rho = std::max(std::abs(ep.values.front()), std::abs(ep.values.back()));
  out.contracting = out.rho < 1.0;
  return out;
}

double theorem_threshold(double alpha, double c1) {
  return 2.0 * (1.0 - alpha) / (1.0 - alpha + 2.0 * c1 * alpha);
}

double c1_of(const TheoryWorkspace& ws, const DenseMatrix& qi_inv) {
  const int m = ws.m;
  const DenseMatrix Ut = transpose(ws.U);
  DenseMatrix Ma = matmul(Ut, matmul(qi_inv, ws.U));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) Ma.at(i, j) *= ws.sigma[i] * ws.sigma[j];
  const DenseMatrix Mb = symmetrized(matmul(ws.Rt, matmul(qi_inv, ws.R)));
  const DenseMatrix Wb = sym_inv_sqrt(Mb);
  return pencil_extremes(Wb, symmetrized(Ma)).hi;
}

RateBound rate_bound_recipe(double alpha, double beta, double c1, double delta1, double delta2) {
  RateBound rb;
  if (alpha <= 0.0 || alpha >= 1.0 || beta < 0.0 || beta >= 1.0 || c1 <= 0.0) return rb;
  rb.mu = 0.5 * (1.0 + alpha);
  rb.gamma = (rb.mu + 1.0) * (rb.mu - alpha) / (alpha * c1 * (rb.mu + 1.0) + rb.mu - alpha);
  rb.theta8 = rb.gamma / (delta2 * (1.0 + beta));
  const double damp = delta1 * (1.0 - beta) * rb.theta8 /
                      (1.0 + c1 * (alpha / (alpha + beta)) * rb.gamma);
  rb.mu_tilde = std::max(beta, 1.0 - damp);
  rb.valid = rb.theta8 > 0.0 && rb.mu_tilde < 1.0;
  return rb;
}

NonsymDiagnostics nonsym_diagnostics(const SaddleProblem& P) {
  require(P.n() <= 1500, "theory: dense analysis is limited to n <= 1500");
  const int n = P.n();
  const int m = P.m();
  const DenseMatrix Ad = dense_of(P.A);
  const DenseMatrix A0 = symmetrized(Ad);
  const DenseMatrix A0sqrt = sym_sqrt(A0);
  const DenseMatrix A0invsqrt = sym_inv_sqrt(A0);

  const Lu lu = lu_factor(Ad);
  DenseMatrix Ainv(n, n);
  {
    Vector e(n, 0.0);
    for (int j = 0; j < n; ++j) {
      e[j] = 1.0;
      const Vector col = lu_solve(lu, e);
      e[j] = 0.0;
      for (int i = 0; i < n; ++i) Ainv.at(i, j) = col[i];
    }
  }

  const DenseMatrix J = matmul(A0sqrt, matmul(Ainv, A0sqrt));
  const DenseMatrix Jinv = matmul(A0invsqrt, matmul(Ad, A0invsqrt));
  const DenseMatrix I = dense_identity(n);

  const DenseMatrix Bd = dense_of(P.B);
  const DenseMatrix Bt = transpose(Bd);
  const DenseMatrix Dd = dense_of(P.D);
  const DenseMatrix L0 = chol(A0);
  DenseMatrix S = matmul(Bt, matmul(Ainv, Bd));
  DenseMatrix S0 = matmul(Bt, ainv_times(L0, Bd));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      S.at(i, j) += Dd.at(i, j);
      S0.at(i, j) += Dd.at(i, j);
    }

  NonsymDiagnostics out;
  out.j_dev = spectral_norm(dsub(J, I));
  out.jinv_dev = spectral_norm(dsub(Jinv, I));
  out.schur_dev = spectral_norm(dsub(S, S0));
  return out;
}

LambdaHatEstimate lambda_hat_estimate(const SparseMatrix& A, const PrecondPtr& ahat, int iters,
                                      std::uint64_t seed) {
  require(A.rows == A.cols, "lambda_hat_estimate: A must be square");
  require(ahat && ahat->dim() == A.rows, "lambda_hat_estimate: Ahat dimension mismatch");
  require(iters > 0, "lambda_hat_estimate: iters must be positive");
  const int n = A.rows;
  Rng rng(seed);

  // Dominant generalized eigenvalue: iterate u <- A Ahat^{-1} u; the Rayleigh
  // quotient <A v, v> / <Ahat v, v> at v = Ahat^{-1} u needs only <u, v>.
  Vector u = rng.gaussian_vector(n);
  double lam_max = 0.0;
  for (int k = 0; k < iters; ++k) {
    const Vector v = ahat->apply(u);
    lam_max = dot(matvec(A, v), v) / std::max(dot(u, v), 1e-300);
    Vector next = matvec(A, v);
    const double nn = norm2(next);
    require(nn > 0.0, "lambda_hat_estimate: A annihilated the iterate");
    u = scaled(next, 1.0 / nn);
  }

  // Smallest one through the shifted operator lam_max I - Ahat^{-1} A, whose
  // dominant eigenvalue is lam_max - lam_min; plain Rayleigh quotient since
  // the iterate converges to an eigenvector.
  Vector z = rng.gaussian_vector(n);
  double shift_rq = 0.0;
  for (int k = 0; k < iters; ++k) {
    Vector Mz = scaled(z, lam_max);
    axpy_inplace(-1.0, ahat->apply(matvec(A, z)), Mz);
    shift_rq = dot(Mz, z) / std::max(dot(z, z), 1e-300);
    const double nn = norm2(Mz);
    if (nn == 0.0) break;  // Ahat^{-1} A == lam_max I exactly
    z = scaled(Mz, 1.0 / nn);
  }

  LambdaHatEstimate out;
  out.lambda_max = lam_max;
  out.lambda_min = std::max(lam_max - shift_rq, 1e-12 * std::abs(lam_max));
  out.kappa = out.lambda_max / out.lambda_min;
  return out;
}

}  // namespace uzawa
