#include "uzawa/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace uzawa {

Vector residual_f(const SaddleProblem& P, const Vector& x, const Vector& y) {
  Vector out = P.f;
  axpy_inplace(-1.0, matvec(P.A, x), out);
  axpy_inplace(-1.0, matvec(P.B, y), out);
  return out;
}

Vector residual_g(const SaddleProblem& P, const Vector& x, const Vector& y) {
  Vector out = matvec_transpose(P.B, x);
  axpy_inplace(-1.0, matvec(P.D, y), out);
  axpy_inplace(-1.0, P.g, out);
  return out;
}

OmegaStep step_omega(const SparseMatrix& A, const Precond& ahat, const Vector& f_i) {
  if (norm2(f_i) == 0.0) return {Vector(f_i.size(), 0.0), 1.0};
  Vector r = ahat.apply(f_i);
  const double den = dot(matvec(A, r), r);
  if (!(den > 0.0)) throw std::runtime_error("step_omega: A not positive on update direction");
  const double omega = dot(f_i, r) / den;
  return {std::move(r), omega};
}

TauStep step_tau(const LinOp& H, const Precond& shat, const Vector& g_i, double theta) {
  if (norm2(g_i) == 0.0) return {Vector(g_i.size(), 0.0), 1.0, 1.0};
  Vector s = shat.apply(g_i);
  if (norm2(s) == 0.0) return {std::move(s), 1.0, 1.0};
  const double den = dot(H(s), s);
  if (!(den > 0.0))
    throw std::runtime_error("step_tau: Schur operator not positive on update direction");
  const double tauhat = dot(g_i, s) / den;
  return {std::move(s), tauhat, theta * tauhat};
}

std::string stop_rule_label(const StopRule& rule) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s(%g%s)", rule.kind == StopKind::Stacked ? "stacked" : "max",
                rule.tol, rule.relative ? ",relative" : "");
  return buf;
}

namespace {

double adaptive_theta(double lambda_hat, double omega) {
  const double t = std::max(0.0, 1.0 - lambda_hat * omega);
  return std::min(1.0, 0.5 * (1.0 - std::sqrt(t)));
}

struct StopBase {
  double stacked0 = 0.0;
  double maxc0 = 0.0;
};

bool rule_holds(const StopRule& rule, double nf, double ng, double nfinf, double nginf,
                const StopBase& base) {
  const double v =
      rule.kind == StopKind::Stacked ? std::hypot(nf, ng) : std::max(nfinf, nginf);
  const double ref = rule.relative
                         ? (rule.kind == StopKind::Stacked ? base.stacked0 : base.maxc0)
                         : 1.0;
  return v < rule.tol * ref;
}

SolveReport run_engine(const SaddleProblem& P, const Precond& xprec, const Precond& yprec,
                       const UzawaConfig& cfg, bool nonsym) {
  validate(P);
  const int n = P.n(), m = P.m();
  require(xprec.dim() == n, "solve: x-preconditioner dimension mismatch");
  require(yprec.dim() == m, "solve: y-preconditioner dimension mismatch");
  require(cfg.max_iters >= 1, "solve: max_iters must be at least 1");
  require(!cfg.stops.empty(), "solve: need at least one stop rule");
  for (const StopRule& rule : cfg.stops) require(rule.tol > 0.0, "solve: stop tolerance must be positive");
  if (cfg.theta.adaptive)
    require(cfg.theta.lambda_hat > 0.0, "solve: adaptive theta needs a positive lambda_hat");
  else
    require(cfg.theta.value > 0.0, "solve: theta must be positive");
  if (!nonsym)
    require(P.symmetric_a, "solve: A is declared nonsymmetric, use solve_nonsymmetric");

  Vector x = cfg.x0;
  if (x.empty()) x.assign(static_cast<std::size_t>(n), 0.0);
  require(static_cast<int>(x.size()) == n, "solve: x0 dimension mismatch");
  Vector y = cfg.y0;
  if (y.empty()) y.assign(static_cast<std::size_t>(m), 0.0);
  require(static_cast<int>(y.size()) == m, "solve: y0 dimension mismatch");

  SolveReport rep;
  StopBase base;
  double init = 0.0;
  double last_nf = 0.0, last_ng = 0.0, last_nfinf = 0.0, last_nginf = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  bool stopped = false;

  for (int i = 0; i < cfg.max_iters; ++i) {
    Vector fi = residual_f(P, x, y);
    const double nf = norm2(fi);
    const double nfinf = norm_inf(fi);
    double omega = 1.0;
    if (nf > 0.0) {
      const Vector r = xprec.apply(fi);
      const double den = dot(matvec(P.A, r), r);
      if (!(den > 0.0))
        throw std::runtime_error(nonsym
                                     ? "solve: symmetric part not positive on iterate"
                                     : "solve: A not positive on update direction");
      omega = dot(fi, r) / den;
      axpy_inplace(omega, r, x);
    }

    Vector gi = residual_g(P, x, y);
    const double ng = norm2(gi);
    const double nginf = norm_inf(gi);

    if (i == 0) {
      rep.initial_fnorm = nf;
      rep.initial_gnorm = ng;
      rep.initial_finf = nfinf;
      rep.initial_ginf = nginf;
      base.stacked0 = std::hypot(nf, ng);
      base.maxc0 = std::max(nfinf, nginf);
      init = base.stacked0;
      if (init == 0.0) {
        rep.converged = true;
        rep.iterations = 0;
        stopped = true;
        break;
      }
    }

    bool all_hold = true;
    for (const StopRule& rule : cfg.stops)
      if (!rule_holds(rule, nf, ng, nfinf, nginf, base)) {
        all_hold = false;
        break;
      }
    if (all_hold) {
      rep.converged = true;
      rep.iterations = i;
      rep.final_fnorm = nf;
      rep.final_gnorm = ng;
      rep.final_finf = nfinf;
      rep.final_ginf = nginf;
      stopped = true;
      break;
    }
    if (std::hypot(nf, ng) > 1e6 * std::max(init, 1e-300)) {
      rep.diverged = true;
      rep.iterations = i;
      rep.final_fnorm = nf;
      rep.final_gnorm = ng;
      rep.final_finf = nfinf;
      rep.final_ginf = nginf;
      stopped = true;
      break;
    }

    const double theta_i =
        cfg.theta.adaptive ? adaptive_theta(cfg.theta.lambda_hat, omega) : cfg.theta.value;
    double tauhat = 1.0, tau = 1.0;
    if (ng > 0.0) {
      const Vector s = yprec.apply(gi);
      if (norm2(s) > 0.0) {
        const Vector Bs = matvec(P.B, s);
        const double den = dot(xprec.apply(Bs), Bs) + dot(matvec(P.D, s), s);
        if (!(den > 0.0))
          throw std::runtime_error("solve: Schur operator not positive on update direction");
        tauhat = dot(gi, s) / den;
        tau = theta_i * tauhat;
        axpy_inplace(tau, s, y);
      }
    }

    if (cfg.keep_history) {
      rep.history.push_back({i, nf, ng, omega, tauhat, tau, theta_i});
      rep.inf_history.push_back({nfinf, nginf});
    }
    last_nf = nf;
    last_ng = ng;
    last_nfinf = nfinf;
    last_nginf = nginf;
  }

  if (!stopped) {
    rep.iterations = cfg.max_iters;
    rep.final_fnorm = last_nf;
    rep.final_gnorm = last_ng;
    rep.final_finf = last_nfinf;
    rep.final_ginf = last_nginf;
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.x = std::move(x);
  rep.y = std::move(y);
  return rep;
}

}  // namespace

SolveReport solve_alg1(const SaddleProblem& P, const PrecondPtr& ahat, const PrecondPtr& shat,
                       const UzawaConfig& cfg) {
  require(ahat != nullptr && shat != nullptr, "solve_alg1: missing preconditioner");
  require(ahat->linear(), "solve_alg1: Ahat must be linear, use solve_alg2");
  require(shat->linear(), "solve_alg1: Shat must be linear, use solve_alg3");
  return run_engine(P, *ahat, *shat, cfg, false);
}

SolveReport solve_alg2(const SaddleProblem& P, const PrecondPtr& psi_a, const PrecondPtr& shat,
                       const UzawaConfig& cfg) {
  require(psi_a != nullptr && shat != nullptr, "solve_alg2: missing preconditioner");
  require(shat->linear(), "solve_alg2: Shat must be linear");
  return run_engine(P, *psi_a, *shat, cfg, false);
}

SolveReport solve_alg3(const SaddleProblem& P, const PrecondPtr& ahat, const PrecondPtr& psi_h,
                       const UzawaConfig& cfg) {
  require(ahat != nullptr && psi_h != nullptr, "solve_alg3: missing preconditioner");
  require(ahat->linear(), "solve_alg3: Ahat must be linear");
  return run_engine(P, *ahat, *psi_h, cfg, false);
}

SolveReport solve_nonsymmetric(const SaddleProblem& P, const PrecondPtr& ahat,
                               const PrecondPtr& shat, const UzawaConfig& cfg) {
  require(ahat != nullptr && shat != nullptr, "solve_nonsymmetric: missing preconditioner");
  require(ahat->linear(), "solve_nonsymmetric: Ahat must be linear");
  require(shat->linear(), "solve_nonsymmetric: Shat must be linear");
  return run_engine(P, *ahat, *shat, cfg, true);
}

void write_history_csv(const std::string& path, const SolveReport& rep) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw std::runtime_error("write_history_csv: cannot open " + path);
  std::fputs("iter,fnorm,gnorm,omega,tauhat,tau,theta\n", out);
  for (const HistoryRow& row : rep.history)
    std::fprintf(out, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", row.iter, row.fnorm, row.gnorm,
                 row.omega, row.tauhat, row.tau, row.theta);
  std::fclose(out);
}

int counts_from_history(const SolveReport& rep, const StopRule& rule) {
  if (rep.initial_fnorm == 0.0 && rep.initial_gnorm == 0.0) return 0;
  StopBase base;
  base.stacked0 = std::hypot(rep.initial_fnorm, rep.initial_gnorm);
  base.maxc0 = std::max(rep.initial_finf, rep.initial_ginf);
  require(rep.history.size() == rep.inf_history.size(),
          "counts_from_history: history was not kept");
  for (std::size_t k = 0; k < rep.history.size(); ++k) {
    const HistoryRow& row = rep.history[k];
    if (rule_holds(rule, row.fnorm, row.gnorm, rep.inf_history[k][0], rep.inf_history[k][1], base))
      return row.iter;
  }
  if ((rep.converged || rep.diverged) &&
      rule_holds(rule, rep.final_fnorm, rep.final_gnorm, rep.final_finf, rep.final_ginf, base))
    return rep.iterations;
  return -1;
}

}  // namespace uzawa
