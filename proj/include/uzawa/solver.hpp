#pragma once

#include <array>
#include <string>
#include <vector>

#include "uzawa/precond.hpp"
#include "uzawa/saddle.hpp"
#include "uzawa/vec.hpp"

namespace uzawa {

enum class StopKind { Stacked, MaxComponent };

struct StopRule {
  StopKind kind = StopKind::Stacked;
  double tol = 1e-6;
  bool relative = false;  // measure against the iteration-0 value
};

std::string stop_rule_label(const StopRule& rule);

struct ThetaRule {
  bool adaptive = false;
  double value = 1.0;       // scalar relaxation when not adaptive
  double lambda_hat = 0.0;  // spectral estimate driving the adaptive rule
};

struct UzawaConfig {
  ThetaRule theta;
  std::vector<StopRule> stops = {StopRule{}};  // stop once every rule holds
  int max_iters = 100000;
  Vector x0;  // empty means zeros
  Vector y0;
  bool keep_history = true;
};

struct HistoryRow {
  int iter;
  double fnorm, gnorm, omega, tauhat, tau, theta;
};

struct SolveReport {
  int iterations = 0;  // completed y-updates before the stop test fired
  bool converged = false;
  bool diverged = false;
  double initial_fnorm = 0.0, initial_gnorm = 0.0;
  double initial_finf = 0.0, initial_ginf = 0.0;
  double final_fnorm = 0.0, final_gnorm = 0.0;
  double final_finf = 0.0, final_ginf = 0.0;
  Vector x, y;
  std::vector<HistoryRow> history;                  // one row per completed iteration
  std::vector<std::array<double, 2>> inf_history;   // parallel max-norms, not serialized
  double seconds = 0.0;
};

// f - A x - B y
Vector residual_f(const SaddleProblem& P, const Vector& x, const Vector& y);
// Bt x - D y - g
Vector residual_g(const SaddleProblem& P, const Vector& x, const Vector& y);

struct OmegaStep {
  Vector r;
  double omega;
};
// r = Ahat^{-1} f_i, omega = <f_i,r>/<A r,r>; a zero residual gives omega = 1
// and r = 0 so the x-update is skipped.
OmegaStep step_omega(const SparseMatrix& A, const Precond& ahat, const Vector& f_i);

struct TauStep {
  Vector s;
  double tauhat, tau;
};
// s = Shat^{-1} g_i, tauhat = <g_i,s>/<H s,s>, tau = theta*tauhat; a zero
// residual gives tauhat = tau = 1 and s = 0 so the y-update is skipped.
TauStep step_tau(const LinOp& H, const Precond& shat, const Vector& g_i, double theta);

// One x-relaxation and one y-relaxation per iteration; the stop rules are
// tested on (f_i, g_i) after the x-update and before the y-update, so
// iterations counts completed y-updates and a start at the exact solution
// reports zero.
SolveReport solve_alg1(const SaddleProblem& P, const PrecondPtr& ahat, const PrecondPtr& shat,
                       const UzawaConfig& cfg);
// Nonlinear inner device psi_a replaces the action of Ahat^{-1}.
SolveReport solve_alg2(const SaddleProblem& P, const PrecondPtr& psi_a, const PrecondPtr& shat,
                       const UzawaConfig& cfg);
// Nonlinear inner device psi_h replaces the action of Shat^{-1}; Ahat stays linear.
SolveReport solve_alg3(const SaddleProblem& P, const PrecondPtr& ahat, const PrecondPtr& psi_h,
                       const UzawaConfig& cfg);
// Nonsymmetric A with SPD symmetric part; the omega denominator <A r,r>
// coincides with the symmetric-part quadratic form.
SolveReport solve_nonsymmetric(const SaddleProblem& P, const PrecondPtr& ahat,
                               const PrecondPtr& shat, const UzawaConfig& cfg);

// Header iter,fnorm,gnorm,omega,tauhat,tau,theta; %.17g fields.
void write_history_csv(const std::string& path, const SolveReport& rep);

// First iteration index at which the rule holds, judged on the recorded
// per-iteration norms plus the stop-triggering values; -1 if never satisfied.
int counts_from_history(const SolveReport& rep, const StopRule& rule);

}  // namespace uzawa
