#include <cmath>

#include "doctest.h"
#include "uzawa/dense.hpp"
#include "uzawa/problems.hpp"
#include "uzawa/solver.hpp"
#include "uzawa/theory.hpp"

using namespace uzawa;

namespace {

DenseMatrix diag2(double a, double b) {
  DenseMatrix M(2, 2);
  M.at(0, 0) = a;
  M.at(1, 1) = b;
  return M;
}

// H = Bt Ahat^{-1} B + D as a dense matrix, through the preconditioner action.
DenseMatrix assemble_h(const SaddleProblem& P, const PrecondPtr& ahat) {
  const int m = P.m();
  DenseMatrix H(m, m);
  Vector e(m, 0.0);
  for (int j = 0; j < m; ++j) {
    e[j] = 1.0;
    Vector col = matvec_transpose(P.B, ahat->apply(matvec(P.B, e)));
    axpy_inplace(1.0, matvec(P.D, e), col);
    e[j] = 0.0;
    for (int i = 0; i < m; ++i) H.at(i, j) = col[i];
  }
  return H;
}

LinOp schur_op(const SaddleProblem& P, const PrecondPtr& ahat) {
  return [&P, ahat](const Vector& v) {
    Vector out = matvec_transpose(P.B, ahat->apply(matvec(P.B, v)));
    axpy_inplace(1.0, matvec(P.D, v), out);
    return out;
  };
}

}  // namespace

TEST_CASE("constants report the scalar preconditioner example") {
  const SaddleProblem P = gen_random_qp(8, 3, 0.5, 5);
  DenseMatrix half_a = dense_of(P.A);
  for (double& v : half_a.a) v *= 0.5;
  const PrecondPtr ahat = make_exact_dense(half_a, "A/2");
  const PrecondPtr shat = make_exact_dense(assemble_h(P, ahat), "H");

  const TheoryReport c = constants(P, ahat, shat);
  CHECK(c.lambda_raw == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(c.lambda0_raw == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(c.lambda == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(c.lambda0 == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(c.kappa1 == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(c.alpha <= 1e-8);
  CHECK(c.kappa2 == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(c.beta <= 1e-7);
  CHECK(c.c0_finite);
  CHECK(c.delta1 == doctest::Approx(c.delta2).epsilon(1e-8));
}

TEST_CASE("constants on a corpus instance are normalized and ordered") {
  const CorpusInstance inst = make_corpus_instance(77, 2);  // jacobi Ahat
  const TheoryReport c = constants(inst.P, inst.ahat, inst.shat);
  CHECK(c.lambda_raw * c.lambda0_raw == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(c.lambda <= 1.0 + 1e-12);
  CHECK(c.lambda0 >= 1.0 - 1e-12);
  CHECK(c.alpha > 0.0);
  CHECK(c.alpha < 1.0);
  CHECK(c.beta >= 0.0);
  CHECK(c.beta < 1.0);
  CHECK(c.c0_finite);
  CHECK(c.delta1 > 0.0);
  CHECK(c.delta1 <= c.delta2 + 1e-12);
  CHECK(c.gamma_finite);
  CHECK(c.gamma2 > 0.0);
  CHECK(c.gamma1 >= c.gamma2);
}

TEST_CASE("zero D switches the coupling constant to its limit") {
  const SaddleProblem P = gen_random_qp(10, 4, 0.0, 9);
  const PrecondPtr ahat = make_jacobi(P.A);
  const PrecondPtr shat = make_identity(4);
  const TheoryReport c = constants(P, ahat, shat);
  CHECK_FALSE(c.c0_finite);
  CHECK(c.delta1 == doctest::Approx(1.0 / c.lambda0_raw).epsilon(1e-12));
  CHECK(c.delta2 == doctest::Approx(1.0 / c.lambda_raw).epsilon(1e-12));
}

TEST_CASE("alpha_i vanishes for scalar preconditioners and stays below alpha") {
  const SaddleProblem P = gen_random_qp(9, 3, 0.3, 11);
  {
    DenseMatrix half_a = dense_of(P.A);
    for (double& v : half_a.a) v *= 0.5;
    const PrecondPtr ahat = make_exact_dense(half_a, "A/2");
    const TheoryWorkspace ws = build_workspace(P, ahat, make_identity(3));
    Rng rng(4);
    const Vector f = rng.gaussian_vector(9);
    const OmegaStep st = step_omega(P.A, *ahat, f);
    CHECK(st.omega == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(alpha_i(ws, f, st.omega) <= 1e-8);
  }
  {
    const CorpusInstance inst = make_corpus_instance(123, 2);  // jacobi Ahat
    const TheoryWorkspace ws = build_workspace(inst.P, inst.ahat, inst.shat);
    Rng rng(5);
    double largest = 0.0;
    for (int k = 0; k < 20; ++k) {
      const Vector f = rng.gaussian_vector(inst.P.n());
      const OmegaStep st = step_omega(inst.P.A, *inst.ahat, f);
      const double ai = alpha_i(ws, f, st.omega);
      CHECK(ai <= ws.consts.alpha + 1e-10);
      const double lw = ws.consts.lambda_raw * st.omega;
      CHECK(lw >= 1.0 / ws.consts.kappa1 - 1e-10);
      CHECK(lw <= 1.0 - ai * ai + 1e-10);
      largest = std::max(largest, ai);
    }
    CHECK(largest > 1e-4);
    CHECK(alpha_i(ws, Vector(inst.P.n(), 0.0), 1.0) == 0.0);
  }
}

TEST_CASE("beta_i satisfies its defining identity and yields an SPD realization") {
  const CorpusInstance inst = make_corpus_instance(123, 2);
  const TheoryWorkspace ws = build_workspace(inst.P, inst.ahat, inst.shat);
  const TheoryReport& c = ws.consts;
  const LinOp hop = schur_op(inst.P, inst.ahat);
  Rng rng(6);
  for (int k = 0; k < 20; ++k) {
    const Vector g = rng.gaussian_vector(inst.P.m());
    const TauStep ts = step_tau(hop, *inst.shat, g, 1.0);
    const BetaGi bg = beta_i_and_gi_spectrum(ws, g, ts.tauhat);
    CHECK(bg.beta_i <= c.beta + 1e-10);

    const Vector s = matvec(ws.Shat_inv, g);
    const Vector u = matvec(ws.Hinvsqrt, g);
    const double identity_rhs = ts.tauhat * dot(g, s) / dot(u, u);
    CHECK(1.0 - bg.beta_i * bg.beta_i == doctest::Approx(identity_rhs).epsilon(1e-7));

    // The realization reproduces the relaxed step on g itself.
    const Vector lhs = matvec(bg.gi_inv, g);
    const Vector rhs = scaled(s, ts.tauhat);
    CHECK(norm2(vsub(lhs, rhs)) <= 1e-9 * std::max(1.0, norm2(rhs)));

    // Its deviation from H^{-1} in the H norm is exactly beta_i.
    const DenseMatrix conj = matmul(ws.Hsqrt, matmul(bg.gi_inv, ws.Hsqrt));
    CHECK(spectral_norm(dsub(conj, dense_identity(inst.P.m()))) ==
          doctest::Approx(bg.beta_i).epsilon(1e-8));

    const EigenPairs ep = sym_eig(bg.gi_inv);
    CHECK(ep.values.front() > 0.0);

    CHECK(bg.abstract_lo >= (1.0 - bg.beta_i) * c.delta1 - 1e-10);
    CHECK(bg.abstract_hi <= (1.0 + bg.beta_i) * c.delta2 + 1e-10);
  }
}

TEST_CASE("the literal tauhat scaling escapes the interval that the realization satisfies") {
  SaddleProblem P;
  P.A = identity(2);
  P.B = scale(identity(2), 0.0);
  P.D = from_triplets(2, 2, {{0, 0, 1.0}, {1, 1, 4.0}});
  P.f = {0.0, 0.0};
  P.g = {1.0, 0.0};
  const PrecondPtr ahat = make_identity(2);
  const PrecondPtr shat = make_identity(2);
  const TheoryWorkspace ws = build_workspace(P, ahat, shat);
  CHECK(ws.consts.alpha <= 1e-12);
  CHECK(ws.consts.c0 == doctest::Approx(0.0));
  CHECK(ws.consts.delta1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ws.consts.delta2 == doctest::Approx(1.0).epsilon(1e-12));

  const Vector g = {1.0, 0.0};
  const TauStep ts = step_tau(schur_op(P, ahat), *shat, g, 1.0);
  CHECK(ts.tauhat == doctest::Approx(1.0).epsilon(1e-14));
  const BetaGi bg = beta_i_and_gi_spectrum(ws, g, ts.tauhat);
  CHECK(bg.beta_i <= 1e-12);
  const double hi_bound = (1.0 + bg.beta_i) * ws.consts.delta2;
  CHECK(bg.abstract_hi <= hi_bound + 1e-10);
  CHECK(bg.abstract_lo >= (1.0 - bg.beta_i) * ws.consts.delta1 - 1e-10);
  CHECK(bg.concrete_hi == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(bg.concrete_hi > hi_bound + 1.0);
}

TEST_CASE("error-propagation matrix matches the worked example") {
  SaddleProblem P;
  P.A = identity(2);
  P.B = scale(identity(2), 0.5);
  P.D = scale(identity(2), 0.0);
  P.f = {1.0, 0.0};
  P.g = {0.0, 1.0};
  const PrecondPtr ahat = make_exact_dense(diag2(0.5, 2.0), "Ahat");
  const TheoryWorkspace ws = build_workspace(P, ahat, make_identity(2));
  CHECK(ws.consts.kappa1 == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(ws.consts.alpha == doctest::Approx(0.6).epsilon(1e-10));
  CHECK(ws.sigma[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(ws.sigma[1] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(ws.R.at(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ws.R.at(1, 1) == doctest::Approx(0.5).epsilon(1e-12));

  const DenseMatrix F = build_fi(ws, dense_identity(2), 0.6);
  REQUIRE(F.rows == 4);
  const double root = std::sqrt(0.6);
  CHECK(F.at(0, 0) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(F.at(1, 1) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(std::abs(F.at(0, 1)) <= 1e-12);
  CHECK(F.at(2, 2) == doctest::Approx(-0.75).epsilon(1e-12));
  CHECK(F.at(3, 3) == doctest::Approx(-0.75).epsilon(1e-12));
  CHECK(std::abs(F.at(2, 3)) <= 1e-12);
  const EigenPairs ep = sym_eig(F);
  CHECK(ep.values[0] == doctest::Approx(-root).epsilon(1e-10));
  CHECK(ep.values[1] == doctest::Approx(-root).epsilon(1e-10));
  CHECK(ep.values[2] == doctest::Approx(root).epsilon(1e-10));
  CHECK(ep.values[3] == doctest::Approx(root).epsilon(1e-10));
  const ContractionCheck cc = contraction_check(F);
  CHECK(cc.rho == doctest::Approx(root).epsilon(1e-10));
  CHECK(cc.contracting);

  CHECK(c1_of(ws, dense_identity(2)) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(theorem_threshold(0.0, 5.0) == doctest::Approx(2.0));

  // With the exact preconditioner the top-left block is wiped out.
  const TheoryWorkspace ws0 = build_workspace(P, make_exact(P.A), make_identity(2));
  CHECK(ws0.consts.alpha <= 1e-12);
  const DenseMatrix F0 = build_fi(ws0, dense_identity(2), 0.0);
  CHECK(std::abs(F0.at(0, 0)) <= 1e-12);
  CHECK(std::abs(F0.at(0, 2)) <= 1e-12);
  CHECK(contraction_check(F0).rho == doctest::Approx(0.75).epsilon(1e-10));
}

TEST_CASE("rate bound recipe reproduces hand values and bounds the matrix") {
  const RateBound rb = rate_bound_recipe(0.6, 0.0, 1.0, 0.5, 2.0);
  REQUIRE(rb.valid);
  CHECK(rb.mu == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(rb.gamma == doctest::Approx(0.28125).epsilon(1e-12));
  CHECK(rb.theta8 == doctest::Approx(0.140625).epsilon(1e-12));
  CHECK(rb.mu_tilde == doctest::Approx(0.9451219512195122).epsilon(1e-12));

  // Distinct singular values pin the SVD basis so c1 is unambiguous; with
  // B = diag(0.5, 0.4) the two pencil sides coincide and c1 = 1 for any
  // diagonal relaxation.
  SaddleProblem P;
  P.A = identity(2);
  P.B = from_triplets(2, 2, {{0, 0, 0.5}, {1, 1, 0.4}});
  P.D = scale(identity(2), 0.0);
  P.f = {1.0, 0.0};
  P.g = {0.0, 1.0};
  const PrecondPtr ahat = make_exact_dense(diag2(0.5, 2.0), "Ahat");
  const TheoryWorkspace ws = build_workspace(P, ahat, make_identity(2));
  CHECK(ws.sigma[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ws.sigma[1] == doctest::Approx(0.4).epsilon(1e-12));

  // G^{-1} = H^{-1} realizes beta_i = 0; Q^{-1} = theta8 H^{-1}.
  DenseMatrix q8 = sym_inv_sqrt(ws.H);
  q8 = matmul(q8, q8);
  for (double& v : q8.a) v *= rb.theta8;
  CHECK(c1_of(ws, q8) == doctest::Approx(1.0).epsilon(1e-10));
  const EigenPairs ep = sym_eig(build_fi(ws, q8, 0.6));
  CHECK(ep.values.front() >= -rb.mu_tilde - 1e-9);
  CHECK(ep.values.back() <= rb.mu + 1e-9);

  CHECK_FALSE(rate_bound_recipe(0.0, 0.3, 1.0, 0.5, 2.0).valid);
}

TEST_CASE("nonsymmetric diagnostics match the rotation example") {
  SaddleProblem P;
  P.A = from_triplets(2, 2, {{0, 0, 2.0}, {0, 1, 1.0}, {1, 0, -1.0}, {1, 1, 2.0}});
  P.B = identity(2);
  P.D = scale(identity(2), 0.0);
  P.f = {1.0, 1.0};
  P.g = {0.0, 0.0};
  P.symmetric_a = false;
  const NonsymDiagnostics d = nonsym_diagnostics(P);
  CHECK(d.j_dev == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-10));
  CHECK(d.jinv_dev == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(d.schur_dev == doctest::Approx(1.0 / (2.0 * std::sqrt(5.0))).epsilon(1e-10));
}

TEST_CASE("power-method estimate brackets the generalized spectrum") {
  Vector d(10);
  for (int i = 0; i < 10; ++i) d[i] = i + 1.0;
  const SparseMatrix A = diag_matrix(d);
  const LambdaHatEstimate est = lambda_hat_estimate(A, make_identity(10), 50, 3);
  CHECK(est.lambda_max == doctest::Approx(10.0).epsilon(0.05));
  CHECK(est.lambda_min == doctest::Approx(1.0).epsilon(0.05));
  CHECK(est.kappa == doctest::Approx(10.0).epsilon(0.10));

  const LambdaHatEstimate exact = lambda_hat_estimate(A, make_exact(A), 20, 3);
  CHECK(exact.lambda_max == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(exact.kappa == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("corpus instances are deterministic and straddle one") {
  const CorpusInstance i1 = make_corpus_instance(42, 4);
  const CorpusInstance i2 = make_corpus_instance(42, 4);
  CHECK(i1.P.n() == i2.P.n());
  CHECK(i1.P.m() == i2.P.m());
  CHECK(i1.P.f == i2.P.f);
  CHECK(i1.P.A.vals == i2.P.A.vals);
  CHECK(i1.ahat_kind == "inflated");
  CHECK(i1.shat_kind == "1.3H");

  const TheoryReport c = constants(i1.P, i1.ahat, i1.shat);
  CHECK(c.lambda_raw * c.lambda0_raw == doctest::Approx(1.0).epsilon(1e-6));

  CHECK(make_corpus_instance(42, 0).ahat_kind == "exact");
  CHECK(make_corpus_instance(42, 2).ahat_kind == "jacobi");
  CHECK(make_corpus_instance(42, 6).shat_kind == "scaled-diag(H)");
}

TEST_CASE("theory checks pass on a corpus slice") {
  const TheoryCheckResult res = run_theory_checks(42, 6);
  CHECK(res.instances == 6);
  CHECK(res.iterations_checked > 20);
  CHECK(res.lemma_violations == 0);
  CHECK(res.omega_bound_violations == 0);
  CHECK(res.theorem_violations == 0);
  CHECK(res.rate1_checked > 0);
  CHECK(res.rate1_violations == 0);
  CHECK(res.fi_bound_checked > 0);
  CHECK(res.fi_bound_violations == 0);
  CHECK(res.hypothesis_met > 0);
  CHECK(res.concrete_interval_checked > 0);
}

TEST_CASE("corollary construction approaches the predicted rate") {
  const CorollaryResult r4 = run_corollary(4.0);
  CHECK(r4.sqrt_alpha == doctest::Approx(std::sqrt(0.6)).epsilon(1e-12));
  CHECK(r4.measured_rate == doctest::Approx(r4.sqrt_alpha).epsilon(0.10));
  CHECK(r4.z_min >= 0.25 - 1e-3);
  CHECK(r4.z_max <= 0.25 + 1e-3);

  const CorollaryResult r16 = run_corollary(16.0);
  CHECK(r16.measured_rate == doctest::Approx(r16.sqrt_alpha).epsilon(0.10));
  CHECK(r16.z_min >= 1.0 / 16.0 - 1e-3);
  CHECK(r16.z_max <= 1.0 / 16.0 + 1e-3);
}
