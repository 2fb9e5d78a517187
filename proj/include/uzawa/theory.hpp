#pragma once

#include <cstdint>
#include <string>

#include "uzawa/precond.hpp"
#include "uzawa/problems.hpp"
#include "uzawa/saddle.hpp"
#include "uzawa/solver.hpp"

namespace uzawa {

// Spectral constants of an instance (dense evaluation, desk scale).
struct TheoryReport {
  double lambda_raw = 0.0, lambda0_raw = 0.0;  // generalized eigenvalues of (A, Ahat)
  double lambda = 0.0, lambda0 = 0.0;          // rescaled so lambda*lambda0 = 1
  double kappa1 = 0.0, alpha = 0.0;
  double kappa2 = 0.0, beta = 0.0;
  bool c0_finite = false;
  double c0 = 0.0;            // largest generalized eigenvalue of (Bt Ahat^{-1} B, D)
  double delta1 = 0.0, delta2 = 0.0;
  bool gamma_finite = false;
  double gamma1 = 0.0, gamma2 = 0.0;  // extremes of (Bt A^{-1} B, Bt Ahat^{-1} B)
};

struct TheoryWorkspace {
  TheoryReport consts;
  int n = 0, m = 0;
  DenseMatrix A, Asqrt, Ainvsqrt;
  DenseMatrix Ahat_inv;
  DenseMatrix H, Hsqrt, Hinvsqrt;
  DenseMatrix Shat_inv;
  DenseMatrix S, Ssqrt;
  DenseMatrix R, Rt;  // S = R Rt, R lower
  DenseMatrix U;      // left singular vectors of Bt A^{-1/2}
  Vector sigma;       // its singular values
};

TheoryWorkspace build_workspace(const SaddleProblem& P, const PrecondPtr& ahat,
                                const PrecondPtr& shat);
TheoryReport constants(const SaddleProblem& P, const PrecondPtr& ahat, const PrecondPtr& shat);

// Contraction factor of the x-relaxation at residual f_i with step omega:
// |(I - omega A^{1/2} Ahat^{-1} A^{1/2}) A^{-1/2} f_i| / |A^{-1/2} f_i|.
double alpha_i(const TheoryWorkspace& ws, const Vector& f_i, double omega);

// Per-iteration inexactness of the y-relaxation and the spectrum extremes of
// S^{1/2} G_i^{-1} S^{1/2} for two realizations of G_i: the literal scaling
// tauhat*Shat^{-1} (concrete) and an SPD matrix constructed so that
// G_i^{-1} g_i = tauhat Shat^{-1} g_i with ||I - H^{1/2} G_i^{-1} H^{1/2}|| =
// beta_i (abstract). Only the abstract realization satisfies the interval
// containment in general.
struct BetaGi {
  double beta_i = 0.0;
  double concrete_lo = 0.0, concrete_hi = 0.0;
  double abstract_lo = 0.0, abstract_hi = 0.0;
  DenseMatrix gi_inv;  // abstract realization
};
BetaGi beta_i_and_gi_spectrum(const TheoryWorkspace& ws, const Vector& g_i, double tauhat);

// Error-propagation block matrix of one full iteration for Q_i^{-1} = theta_i
// G_i^{-1}; square of side 2m.
DenseMatrix build_fi(const TheoryWorkspace& ws, const DenseMatrix& qi_inv, double alpha);

struct ContractionCheck {
  double rho = 0.0;
  bool contracting = false;
};
ContractionCheck contraction_check(const DenseMatrix& fi);

// Right-hand side of the convergence hypothesis theta(1+beta)delta2 < bound.
double theorem_threshold(double alpha, double c1);
// Largest generalized eigenvalue of (Sigma0t Ut Q^{-1} U Sigma0, Rt Q^{-1} R);
// invariant under scaling of Q^{-1}.
double c1_of(const TheoryWorkspace& ws, const DenseMatrix& qi_inv);

// Two-sided eigenvalue bound -mu_tilde <= eig(F_i(theta8)) <= mu obtained from
// the explicit rate recipe; valid only when alpha > 0.
struct RateBound {
  bool valid = false;
  double mu = 0.0, mu_tilde = 0.0, theta8 = 0.0, gamma = 0.0;
};
RateBound rate_bound_recipe(double alpha, double beta, double c1, double delta1, double delta2);

// Deviation of a nonsymmetric A from its symmetric part A0 as seen by the
// preconditioned theory: spectral norms of J - I, J^{-1} - I and of the two
// Schur complements, where J = A0^{1/2} A^{-1} A0^{1/2}.
struct NonsymDiagnostics {
  double j_dev = 0.0;
  double jinv_dev = 0.0;
  double schur_dev = 0.0;
};
NonsymDiagnostics nonsym_diagnostics(const SaddleProblem& P);

// Power-method estimate of the extreme generalized eigenvalues of (A, Ahat).
struct LambdaHatEstimate {
  double lambda_min = 0.0, lambda_max = 0.0, kappa = 0.0;
};
LambdaHatEstimate lambda_hat_estimate(const SparseMatrix& A, const PrecondPtr& ahat, int iters,
                                      std::uint64_t seed);

// One seeded random saddle instance with its preconditioner pair; Ahat is
// rescaled at construction so the generalized eigenvalues straddle 1.
struct CorpusInstance {
  SaddleProblem P;
  PrecondPtr ahat;
  PrecondPtr shat;
  std::string ahat_kind;
  std::string shat_kind;
};
CorpusInstance make_corpus_instance(std::uint64_t corpus_seed, int idx);

// Instrumented runs over the corpus checking the lemma, the theorem, the
// per-iteration contraction inequality, and the explicit rate bound.
struct TheoryCheckResult {
  int instances = 0;
  int iterations_checked = 0;
  int lemma_violations = 0;
  int omega_bound_violations = 0;
  int theorem_violations = 0;
  int hypothesis_met = 0;
  int rate1_checked = 0;
  int rate1_violations = 0;
  int fi_bound_checked = 0;
  int fi_bound_violations = 0;
  int concrete_interval_checked = 0;
  int concrete_interval_violations = 0;  // informational: the literal scaling escapes
  double seconds = 0.0;
};
TheoryCheckResult run_theory_checks(std::uint64_t corpus_seed, int count);

// Diagonal construction with kappa1 = kappa whose asymptotic rate is
// sqrt(alpha) at theta = lambda; z = theta*tauhat stays at 1/kappa1.
struct CorollaryResult {
  double kappa1 = 0.0, alpha = 0.0, sqrt_alpha = 0.0;
  double measured_rate = 0.0;
  double z_min = 0.0, z_max = 0.0;
  int iterations = 0;
};
CorollaryResult run_corollary(double kappa);

}  // namespace uzawa
