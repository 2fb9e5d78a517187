#include "uzawa/problems.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "uzawa/dense.hpp"
#include "uzawa/mm_io.hpp"
#include "uzawa/version.hpp"

namespace uzawa {

namespace {

// n by (n-1) difference factors used by the Q1-P0 coupling
SparseMatrix stokes_ho(int n) {
  std::vector<Triplet> t;
  for (int i = 0; i < n - 1; ++i) {
    t.push_back({i, i, -1.0});
    t.push_back({i + 1, i, 1.0});
  }
  return from_triplets(n, n - 1, t);
}

SparseMatrix stokes_hn(int n) {
  std::vector<Triplet> t;
  for (int i = 0; i < n - 1; ++i) {
    t.push_back({i, i, 1.0});
    t.push_back({i + 1, i, 1.0});
  }
  return from_triplets(n, n - 1, t);
}

}  // namespace

SaddleProblem gen_elasticity(int n, double mu) {
  require(n >= 2, "gen_elasticity: n must be at least 2");
  require(mu > 0.0, "gen_elasticity: mu must be positive");
  const double h = 1.0 / n;

  SparseMatrix H1 = tridiag(n - 1, -1.0, 2.0, -1.0);
  SparseMatrix H2 = tridiag(n, -1.0, 2.0, -1.0);
  {
    std::vector<Triplet> t = {{0, 0, -1.0}};  // natural boundary on the first node
    H2 = add(H2, from_triplets(n, n, t));
  }
  SparseMatrix A1 = add(kron(identity(n), H1), kron(H2, identity(n - 1)));
  SparseMatrix A2 = add(kron(identity(n - 1), H2), kron(H1, identity(n)));
  SparseMatrix A = scale(block_diag(A1, A2), mu / (h * h));

  std::vector<Triplet> td;
  for (int i = 0; i < n - 1; ++i) {
    td.push_back({i, i, 1.0});
    td.push_back({i, i + 1, -1.0});
  }
  SparseMatrix Dd = from_triplets(n - 1, n, td);
  SparseMatrix B1 = scale(kron(identity(n), Dd), 1.0 / h);
  SparseMatrix B2 = scale(kron(Dd, identity(n)), 1.0 / h);
  SparseMatrix B = vstack(B1, B2);

  std::vector<Triplet> tinv;
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k) {
      const double ccx = (k + 0.5) * h;
      const double ccy = (l + 0.5) * h;
      const bool inside = ccx > 0.25 && ccx < 0.75 && ccy > 0.25 && ccy < 0.75;
      const double lambda = inside ? 1000.0 : 0.0;
      tinv.push_back({l * n + k, l * n + k, 1.0 / (mu + lambda)});
    }

  SaddleProblem P;
  P.A = std::move(A);
  P.B = std::move(B);
  P.D = from_triplets(n * n, n * n, tinv);
  P.f.assign(static_cast<std::size_t>(P.A.rows), 0.0);
  P.g.assign(static_cast<std::size_t>(n) * n, 1.0);
  P.h = h;
  return P;
}

SaddleProblem gen_convection(int n, double b, double mu) {
  SaddleProblem P = gen_elasticity(n, mu);
  if (b == 0.0) return P;
  const double h = P.h;
  SparseMatrix Sk = tridiag(n - 1, -1.0, 0.0, 1.0);
  SparseMatrix C1 = kron(identity(n), Sk);
  SparseMatrix C2 = kron(Sk, identity(n));
  P.A = add(P.A, scale(block_diag(C1, C2), b / (4.0 * h)));
  P.symmetric_a = false;
  return P;
}

SaddleProblem gen_stokes_q1p0(int n, double nu, double beta) {
  require(n >= 2, "gen_stokes_q1p0: n must be at least 2");
  require(nu > 0.0, "gen_stokes_q1p0: nu must be positive");
  require(beta >= 0.0, "gen_stokes_q1p0: beta must be nonnegative");
  const double h = 1.0 / n;

  SparseMatrix M = tridiag(n - 1, 1.0, 4.0, 1.0);
  SparseMatrix K = tridiag(n - 1, -1.0, 2.0, -1.0);
  SparseMatrix A0 = scale(add(kron(M, K), kron(K, M)), nu / 6.0);
  SparseMatrix A = block_diag(A0, A0);

  SparseMatrix Ho = stokes_ho(n);
  SparseMatrix Hn = stokes_hn(n);
  SparseMatrix B1p = scale(kron(Hn, Ho), h / 2.0);
  SparseMatrix B2p = scale(kron(Ho, Hn), h / 2.0);
  SparseMatrix B = vstack(transpose(B1p), transpose(B2p));

  SparseMatrix TN = tridiag(n, -1.0, 2.0, -1.0);
  TN = add(TN, from_triplets(n, n, {{0, 0, -1.0}, {n - 1, n - 1, -1.0}}));
  SparseMatrix D = scale(add(kron(identity(n), TN), kron(TN, identity(n))), beta * h * h);

  const int nv = (n - 1) * (n - 1);
  Vector f(static_cast<std::size_t>(2) * nv, 0.0);
  for (int j = 0; j < n - 1; ++j) f[static_cast<std::size_t>(nv - (n - 1) + j)] = nu;

  SaddleProblem P;
  P.A = std::move(A);
  P.B = std::move(B);
  P.D = std::move(D);
  P.f = std::move(f);
  P.g.assign(static_cast<std::size_t>(n) * n, 0.0);
  P.h = h;
  return P;
}

SaddleProblem gen_algebraic(int n, int m) {
  require(n >= 2 && m >= 1 && m <= n, "gen_algebraic: need n >= m >= 1");
  const double sigma = 1.5;
  const double scale0 = 1.0 / (std::sqrt(2.0 * 3.14159265358979323846) * sigma);

  std::vector<Triplet> ta;
  const int band = 64;  // entries beyond this offset underflow to exact zero
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - band); j <= std::min(n - 1, i + band); ++j) {
      const double d = static_cast<double>(i - j);
      const double v = scale0 * std::exp(-d * d / (2.0 * sigma * sigma));
      if (v != 0.0) ta.push_back({i, j, v});
    }

  std::vector<Triplet> tb;
  for (int i = 0; i < m; ++i) {
    if (i > 0) tb.push_back({i, i - 1, 1.0 / 1000.0});
    tb.push_back({i, i, 4.0 / 1000.0});
    if (i < m - 1) tb.push_back({i, i + 1, 1.0 / 1000.0});
  }

  SaddleProblem P;
  P.A = from_triplets(n, n, ta);
  P.B = from_triplets(n, m, tb);
  P.D = identity(m);
  P.x_star.assign(static_cast<std::size_t>(n), 1.0);
  P.y_star.assign(static_cast<std::size_t>(m), 1.0);
  P.has_solution = true;
  P.f = axpy(1.0, matvec(P.A, P.x_star), matvec(P.B, P.y_star));
  P.g = vsub(matvec_transpose(P.B, P.x_star), matvec(P.D, P.y_star));
  return P;
}

SaddleProblem gen_random_qp(int n, int m, double eps, std::uint64_t seed) {
  require(n >= 2 && m >= 1 && m <= n, "gen_random_qp: need n >= m >= 1");
  require(eps >= 0.0, "gen_random_qp: eps must be nonnegative");
  Rng rng(seed);

  DenseMatrix L(n, n);
  for (double& v : L.a) v = 0.5 * rng.gaussian();
  DenseMatrix Ad = matmul(L, transpose(L));
  for (int i = 0; i < n; ++i) Ad.at(i, i) += 1.0;
  std::vector<Triplet> ta;
  ta.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) ta.push_back({i, j, Ad.at(i, j)});

  SparseMatrix B;
  bool full_rank = false;
  for (int attempt = 0; attempt < 5 && !full_rank; ++attempt) {
    std::vector<Triplet> tb;
    tb.reserve(static_cast<std::size_t>(n) * m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) tb.push_back({i, j, rng.gaussian()});
    B = from_triplets(n, m, tb);
    DenseMatrix G(m, m);  // Gram matrix; Cholesky succeeds iff B has full column rank
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += B.at(k, i) * B.at(k, j);
        G.at(i, j) = s;
      }
    try {
      chol(G);
      full_rank = true;
    } catch (const std::runtime_error&) {
    }
  }
  require(full_rank, "gen_random_qp: could not draw a full-rank B");

  SaddleProblem P;
  P.A = from_triplets(n, n, ta);
  P.B = std::move(B);
  P.D = scale(identity(m), eps);
  P.x_star = rng.gaussian_vector(n);
  P.y_star = rng.gaussian_vector(m);
  P.has_solution = true;
  P.f = axpy(1.0, matvec(P.A, P.x_star), matvec(P.B, P.y_star));
  P.g = vsub(matvec_transpose(P.B, P.x_star), matvec(P.D, P.y_star));
  return P;
}

void export_problem(const SaddleProblem& P, const std::string& name, const std::string& dir) {
  validate(P);
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path base(dir);

  write_matrix_market((base / "A.mtx").string(), P.A, P.symmetric_a);
  write_matrix_market((base / "B.mtx").string(), P.B, false);
  write_matrix_market((base / "D.mtx").string(), P.D, true);
  write_vector_market((base / "f.mtx").string(), P.f);
  write_vector_market((base / "g.mtx").string(), P.g);
  if (P.has_solution) {
    write_vector_market((base / "x_star.mtx").string(), P.x_star);
    write_vector_market((base / "y_star.mtx").string(), P.y_star);
  }

  nlohmann::json meta;
  meta["name"] = name;
  meta["n"] = P.n();
  meta["m"] = P.m();
  meta["h"] = P.h;
  meta["symmetric_a"] = P.symmetric_a;
  meta["has_solution"] = P.has_solution;
  meta["version"] = kVersion;
  std::ofstream out(base / "meta.json");
  if (!out) throw std::runtime_error("export_problem: cannot write meta.json");
  out << meta.dump(2) << "\n";
}

}  // namespace uzawa
