#include <chrono>
#include <cmath>

#include "uzawa/dense.hpp"
#include "uzawa/theory.hpp"
#include "uzawa/tolerances.hpp"

namespace uzawa {

namespace {

// Rescales the inverse action of a wrapped preconditioner by a constant.
class ScaledPrecond final : public Precond {
 public:
  ScaledPrecond(PrecondPtr base, double factor)
      : base_(std::move(base)), factor_(factor) {}
  Vector apply(const Vector& v) const override { return scaled(base_->apply(v), factor_); }
  int dim() const override { return base_->dim(); }
  bool linear() const override { return base_->linear(); }
  std::string name() const override { return "scaled " + base_->name(); }

 private:
  PrecondPtr base_;
  double factor_;
};

// Extreme generalized eigenvalues of (A, Ahat) from the assembled inverse.
void pencil_raw(const SparseMatrix& A, const Precond& ahat, double* lo, double* hi) {
  const int n = A.rows;
  const DenseMatrix Hi = assemble_dense_operator([&](const Vector& v) { return ahat.apply(v); }, n);
  DenseMatrix His(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) His.at(i, j) = 0.5 * (Hi.at(i, j) + Hi.at(j, i));
  const DenseMatrix W = sym_sqrt(His);
  DenseMatrix Ad = dense_of(A);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = 0.5 * (Ad.at(i, j) + Ad.at(j, i));
      Ad.at(i, j) = v;
      Ad.at(j, i) = v;
    }
  DenseMatrix M = matmul(W, matmul(Ad, W));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = 0.5 * (M.at(i, j) + M.at(j, i));
      M.at(i, j) = v;
      M.at(j, i) = v;
    }
  const EigenPairs ep = sym_eig(M);
  *lo = ep.values.front();
  *hi = ep.values.back();
}

}  // namespace

CorpusInstance make_corpus_instance(std::uint64_t corpus_seed, int idx) {
  require(idx >= 0, "make_corpus_instance: idx must be nonnegative");
  Rng rng(corpus_seed + static_cast<std::uint64_t>(idx));
  const int n = 8 + static_cast<int>(rng.uniform() * 23.0);        // [8, 30]
  const int mcap = std::min(12, n);
  const int m = 2 + static_cast<int>(rng.uniform() * (mcap - 1));  // [2, mcap]
  const double eps = 0.1 + 1.9 * rng.uniform();
  const std::uint64_t qp_seed = corpus_seed * 1000003ull + static_cast<std::uint64_t>(idx) * 7919ull + 1ull;

  CorpusInstance inst;
  inst.P = gen_random_qp(n, m, eps, qp_seed);

  PrecondPtr pre;
  switch (idx % 3) {
    case 0:
      pre = make_exact(inst.P.A);
      inst.ahat_kind = "exact";
      break;
    case 1: {
      DenseMatrix Ad = dense_of(inst.P.A);
      for (int i = 0; i < n; ++i) Ad.at(i, i) += 0.3 * std::abs(rng.gaussian()) * Ad.at(i, i);
      pre = make_exact_dense(std::move(Ad), "inflated A");
      inst.ahat_kind = "inflated";
      break;
    }
    default:
      pre = make_jacobi(inst.P.A);
      inst.ahat_kind = "jacobi";
      break;
  }
  double lo = 0.0, hi = 0.0;
  pencil_raw(inst.P.A, *pre, &lo, &hi);
  require(lo > 0.0, "make_corpus_instance: Ahat pencil is not positive");
  // Ahat <- c Ahat moves the generalized eigenvalues to straddle 1.
  const double c = std::sqrt(lo * hi);
  inst.ahat = std::make_shared<ScaledPrecond>(std::move(pre), 1.0 / c);

  DenseMatrix Hd(m, m);
  {
    Vector e(m, 0.0);
    for (int j = 0; j < m; ++j) {
      e[j] = 1.0;
      Vector col = matvec_transpose(inst.P.B, inst.ahat->apply(matvec(inst.P.B, e)));
      axpy_inplace(1.0, matvec(inst.P.D, e), col);
      e[j] = 0.0;
      for (int i = 0; i < m; ++i) Hd.at(i, j) = col[i];
    }
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        const double v = 0.5 * (Hd.at(i, j) + Hd.at(j, i));
        Hd.at(i, j) = v;
        Hd.at(j, i) = v;
      }
  }
  switch ((idx / 3) % 3) {
    case 0: {
      Vector d(m);
      for (int i = 0; i < m; ++i) d[i] = Hd.at(i, i);
      inst.shat = make_jacobi_vector(std::move(d), "diag(H)");
      inst.shat_kind = "diag(H)";
      break;
    }
    case 1: {
      DenseMatrix M = Hd;
      for (double& v : M.a) v *= 1.3;
      inst.shat = make_exact_dense(std::move(M), "1.3 H");
      inst.shat_kind = "1.3H";
      break;
    }
    default: {
      Vector d(m);
      for (int i = 0; i < m; ++i) d[i] = Hd.at(i, i) * (1.0 + 0.5 * std::abs(rng.gaussian()));
      inst.shat = make_jacobi_vector(std::move(d), "scaled diag(H)");
      inst.shat_kind = "scaled-diag(H)";
      break;
    }
  }
  return inst;
}

namespace {

struct IterRecord {
  double e1 = 0.0, e2 = 0.0;  // error components at the start of the iteration
  double rho = 0.0;           // ||F_i|| for this iteration's relaxation
  double ai = 0.0;
  bool complete = false;  // both updates ran
};

void run_instrumented(const CorpusInstance& inst, const TheoryWorkspace& ws, double theta,
                      int maxit, double rel_tol, TheoryCheckResult& res) {
  const SaddleProblem& P = inst.P;
  const TheoryReport& c = ws.consts;
  const double slack = tol::kLemmaSlack;

  const LinOp hop = [&](const Vector& v) {
    Vector out = matvec_transpose(P.B, inst.ahat->apply(matvec(P.B, v)));
    axpy_inplace(1.0, matvec(P.D, v), out);
    return out;
  };

  Vector x(P.n(), 0.0), y(P.m(), 0.0);
  std::vector<IterRecord> recs;
  double init = -1.0;

  for (int i = 0; i < maxit; ++i) {
    const Vector f_i = residual_f(P, x, y);
    const double nf = norm2(f_i);

    IterRecord rec;
    rec.e1 = c.alpha > 0.0 ? std::sqrt(c.alpha) * norm2(matvec(ws.Ainvsqrt, f_i)) : 0.0;
    rec.e2 = norm2(matvec(ws.Rt, vsub(y, P.y_star)));

    double omega = 1.0;
    if (nf > 0.0) {
      const OmegaStep st = step_omega(P.A, *inst.ahat, f_i);
      omega = st.omega;
      rec.ai = alpha_i(ws, f_i, omega);
      if (rec.ai > c.alpha + slack) ++res.lemma_violations;
      const double lw = c.lambda_raw * omega;
      if (lw < 1.0 / c.kappa1 - slack || lw > 1.0 - rec.ai * rec.ai + slack)
        ++res.omega_bound_violations;
      axpy_inplace(omega, st.r, x);
    }

    const Vector g_i = residual_g(P, x, y);
    const double ng = norm2(g_i);
    const double stacked = std::hypot(nf, ng);  // same pairing the solver stops on
    if (init < 0.0) init = stacked;
    recs.push_back(rec);
    if (stacked < rel_tol * std::max(init, 1e-300) || ng == 0.0) break;

    const TauStep ts = step_tau(hop, *inst.shat, g_i, theta);
    const BetaGi bg = beta_i_and_gi_spectrum(ws, g_i, ts.tauhat);
    if (bg.beta_i > c.beta + slack) ++res.lemma_violations;
    const double lo_bound = (1.0 - bg.beta_i) * c.delta1;
    const double hi_bound = (1.0 + bg.beta_i) * c.delta2;
    if (bg.abstract_lo < lo_bound - slack || bg.abstract_hi > hi_bound + slack)
      ++res.lemma_violations;
    ++res.concrete_interval_checked;
    if (bg.concrete_lo < lo_bound - slack || bg.concrete_hi > hi_bound + slack)
      ++res.concrete_interval_violations;

    DenseMatrix qi_inv = bg.gi_inv;
    for (double& v : qi_inv.a) v *= theta;
    const DenseMatrix F = build_fi(ws, qi_inv, c.alpha);
    const double rho = contraction_check(F).rho;
    recs.back().rho = rho;
    const double c1 = c1_of(ws, qi_inv);
    if (theta * (1.0 + c.beta) * c.delta2 < theorem_threshold(c.alpha, c1)) {
      ++res.hypothesis_met;
      if (rho >= 1.0 + tol::kThetaMargin) ++res.theorem_violations;
    }

    if (c.alpha > 1e-14) {
      const RateBound rb = rate_bound_recipe(c.alpha, c.beta, c1, c.delta1, c.delta2);
      if (rb.valid) {
        DenseMatrix q8 = bg.gi_inv;
        for (double& v : q8.a) v *= rb.theta8;
        const EigenPairs ep = sym_eig(build_fi(ws, q8, c.alpha));
        ++res.fi_bound_checked;
        if (ep.values.front() < -rb.mu_tilde - tol::kFiBoundSlack ||
            ep.values.back() > rb.mu + tol::kFiBoundSlack)
          ++res.fi_bound_violations;
      }
    }

    axpy_inplace(ts.tau, ts.s, y);
    recs.back().complete = true;
    ++res.iterations_checked;
  }

  for (std::size_t j = 0; j + 1 < recs.size(); ++j) {
    if (!recs[j].complete) continue;
    const IterRecord& a = recs[j];
    const IterRecord& b = recs[j + 1];
    const double factor = c.alpha > 0.0 ? (a.ai * a.ai) / (c.alpha * c.alpha) : 1.0;
    const double lhs = b.e1 * b.e1 + b.e2 * b.e2;
    const double rhs = a.rho * a.rho * (factor * a.e1 * a.e1 + a.e2 * a.e2);
    ++res.rate1_checked;
    if (lhs > rhs + tol::kRate1Slack * std::max(1.0, rhs)) ++res.rate1_violations;
  }
}

}  // namespace

TheoryCheckResult run_theory_checks(std::uint64_t corpus_seed, int count) {
  require(count > 0, "run_theory_checks: count must be positive");
  const auto t0 = std::chrono::steady_clock::now();
  TheoryCheckResult res;
  for (int idx = 0; idx < count; ++idx) {
    const CorpusInstance inst = make_corpus_instance(corpus_seed, idx);
    const TheoryWorkspace ws = build_workspace(inst.P, inst.ahat, inst.shat);
    run_instrumented(inst, ws, 0.5, 40, 1e-10, res);
    run_instrumented(inst, ws, 0.1, 40, 1e-10, res);
    ++res.instances;
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

CorollaryResult run_corollary(double kappa) {
  require(kappa > 1.0, "run_corollary: kappa must exceed 1");
  const int n = 40, m = 10;

  SaddleProblem P;
  P.A = identity(n);
  {
    std::vector<Triplet> tb;
    for (int j = 0; j < m; ++j) tb.push_back({j, j, 1.0});
    P.B = from_triplets(n, m, tb);
  }
  P.D = scale(identity(m), 0.0);
  Rng rng(7);
  P.x_star = rng.gaussian_vector(n);
  P.y_star = rng.gaussian_vector(m);
  P.has_solution = true;
  P.f = axpy(1.0, matvec(P.A, P.x_star), matvec(P.B, P.y_star));
  P.g = matvec_transpose(P.B, P.x_star);

  // Inverse action sqrt(kappa) on the first m coordinates, 1/sqrt(kappa) on
  // coordinate m, 1 elsewhere: lambda0 = sqrt(kappa), lambda = 1/sqrt(kappa).
  const double rk = std::sqrt(kappa);
  Vector dinv(n, 1.0);
  for (int i = 0; i < m; ++i) dinv[i] = rk;
  dinv[m] = 1.0 / rk;
  Vector d(n);
  for (int i = 0; i < n; ++i) d[i] = 1.0 / dinv[i];
  const PrecondPtr ahat = make_jacobi_vector(std::move(d), "corollary Ahat");
  const PrecondPtr shat = make_identity(m);
  const double theta = 1.0 / rk;  // theta = lambda

  const LinOp hop = [&](const Vector& v) {
    return matvec_transpose(P.B, ahat->apply(matvec(P.B, v)));
  };

  CorollaryResult out;
  out.kappa1 = kappa;
  out.alpha = (kappa - 1.0) / (kappa + 1.0);
  out.sqrt_alpha = std::sqrt(out.alpha);
  out.z_min = 1e300;
  out.z_max = -1e300;

  Vector x(n, 0.0), y(m, 0.0);
  std::vector<double> enorm;  // stacked error at the start of each iteration
  const double sa = std::sqrt(out.alpha);
  for (int i = 0; i < 200; ++i) {
    const Vector f_i = residual_f(P, x, y);
    const double e1 = sa * norm2(f_i);  // A = I and V orthogonal
    const double e2 = norm2(vsub(y, P.y_star));
    const double stacked = std::hypot(e1, e2);
    enorm.push_back(stacked);
    if (stacked < 1e-11) break;
    const OmegaStep st = step_omega(P.A, *ahat, f_i);
    axpy_inplace(st.omega, st.r, x);
    const Vector g_i = residual_g(P, x, y);
    const TauStep ts = step_tau(hop, *shat, g_i, theta);
    const double z = theta * ts.tauhat;
    out.z_min = std::min(out.z_min, z);
    out.z_max = std::max(out.z_max, z);
    axpy_inplace(ts.tau, ts.s, y);
    ++out.iterations;
  }

  // Geometric mean of consecutive ratios over a settled tail window.
  const int count = static_cast<int>(enorm.size());
  require(count >= 14, "run_corollary: trajectory too short to measure a rate");
  double logsum = 0.0;
  int terms = 0;
  for (int j = count - 12; j < count - 2; ++j) {
    logsum += std::log(enorm[j + 1] / enorm[j]);
    ++terms;
  }
  out.measured_rate = std::exp(logsum / terms);
  return out;
}

}  // namespace uzawa
