#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "uzawa/csr.hpp"
#include "uzawa/mm_io.hpp"
#include "uzawa/saddle.hpp"

using namespace uzawa;

namespace {

// dense oracle: row-major buffer
std::vector<double> to_dense(const SparseMatrix& M) {
  std::vector<double> d(static_cast<std::size_t>(M.rows) * M.cols, 0.0);
  for (int r = 0; r < M.rows; ++r)
    for (int k = M.row_ptr[r]; k < M.row_ptr[r + 1]; ++k)
      d[static_cast<std::size_t>(r) * M.cols + M.col_idx[k]] = M.vals[k];
  return d;
}

Vector dense_matvec(const std::vector<double>& d, int rows, int cols, const Vector& v) {
  Vector out(static_cast<std::size_t>(rows), 0.0);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out[r] += d[static_cast<std::size_t>(r) * cols + c] * v[c];
  return out;
}

SparseMatrix random_sparse(int rows, int cols, double density, Rng& rng) {
  std::vector<Triplet> t;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (rng.uniform() < density) t.push_back({r, c, rng.gaussian()});
  return from_triplets(rows, cols, std::move(t));
}

}  // namespace

TEST_CASE("vector ops") {
  CHECK(dot({1, 2}, {3, 4}) == doctest::Approx(11).epsilon(1e-15));
  CHECK(norm2({3, 4}) == doctest::Approx(5).epsilon(1e-15));
  const Vector r = axpy(2.0, {1, 0}, {0, 1});
  CHECK(r[0] == 2.0);
  CHECK(r[1] == 1.0);
  CHECK_THROWS(dot({1.0}, {1.0, 2.0}));
}

TEST_CASE("matvec examples") {
  const SparseMatrix I3 = identity(3);
  const Vector v{1, 2, 3};
  CHECK(matvec(I3, v) == v);

  const SparseMatrix T = tridiag(3, -1, 2, -1);
  const Vector w = matvec(T, {1, 1, 1});
  CHECK(w[0] == doctest::Approx(1));
  CHECK(w[1] == doctest::Approx(0));
  CHECK(w[2] == doctest::Approx(1));

  // zero rows stay zero
  SparseMatrix Z = from_triplets(3, 3, {{1, 1, 5.0}});
  const Vector z = matvec(Z, {1, 1, 1});
  CHECK(z[0] == 0.0);
  CHECK(z[1] == 5.0);
  CHECK(z[2] == 0.0);

  CHECK_THROWS(matvec(I3, {1, 2}));
}

TEST_CASE("matvec_transpose examples") {
  const SparseMatrix col = from_triplets(3, 1, {{0, 0, 1}, {1, 0, 2}, {2, 0, 3}});
  const Vector r = matvec_transpose(col, {1, 1, 1});
  REQUIRE(r.size() == 1);
  CHECK(r[0] == doctest::Approx(6));

  const SparseMatrix I3 = identity(3);
  const Vector v{4, 5, 6};
  CHECK(matvec_transpose(I3, v) == v);

  const SparseMatrix Z = from_triplets(2, 3, {});
  const Vector z = matvec_transpose(Z, {1, 1});
  CHECK(z == Vector{0, 0, 0});
}

TEST_CASE("construction dedups, drops zeros, sorts columns") {
  const SparseMatrix M =
      from_triplets(2, 3, {{0, 2, 1.0}, {0, 0, 2.0}, {0, 2, 3.0}, {1, 1, 0.0}, {1, 0, -1.0}, {1, 0, 1.0}});
  CHECK(M.nnz() == 2);  // (0,0)=2, (0,2)=4; (1,1) zero dropped, (1,0) summed to zero
  CHECK(M.at(0, 0) == 2.0);
  CHECK(M.at(0, 2) == 4.0);
  CHECK(M.at(1, 0) == 0.0);
  for (int r = 0; r < M.rows; ++r)
    for (int k = M.row_ptr[r] + 1; k < M.row_ptr[r + 1]; ++k)
      CHECK(M.col_idx[k - 1] < M.col_idx[k]);
}

TEST_CASE("kron examples") {
  const SparseMatrix K1 = kron(identity(2), identity(3));
  CHECK(K1.rows == 6);
  CHECK(K1.nnz() == 6);
  for (int i = 0; i < 6; ++i) CHECK(K1.at(i, i) == 1.0);

  const SparseMatrix d2 = from_triplets(1, 1, {{0, 0, 2.0}});
  const SparseMatrix T2 = tridiag(2, -1, 2, -1);
  const SparseMatrix K2 = kron(d2, T2);
  CHECK(K2.at(0, 0) == 4.0);
  CHECK(K2.at(0, 1) == -2.0);
  CHECK(K2.at(1, 0) == -2.0);
  CHECK(K2.at(1, 1) == 4.0);

  const SparseMatrix s3 = from_triplets(1, 1, {{0, 0, 3.0}});
  const SparseMatrix M = tridiag(3, 1, 5, 2);
  const SparseMatrix K3 = kron(s3, M);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) CHECK(K3.at(r, c) == doctest::Approx(3.0 * M.at(r, c)));
}

TEST_CASE("kron mixed product property") {
  Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const SparseMatrix M = random_sparse(4, 3, 0.6, rng);
    const SparseMatrix N = random_sparse(3, 5, 0.6, rng);
    const Vector u = rng.gaussian_vector(3);
    const Vector v = rng.gaussian_vector(5);
    Vector uv(15);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 5; ++j) uv[i * 5 + j] = u[i] * v[j];
    const Vector lhs = matvec(kron(M, N), uv);
    const Vector Mu = matvec(M, u);
    const Vector Nv = matvec(N, v);
    double scale = 0.0;
    for (double x : lhs) scale = std::max(scale, std::abs(x));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(std::abs(lhs[i * 3 + j] - Mu[i] * Nv[j]) <= 1e-13 * std::max(1.0, scale));
  }
}

TEST_CASE("matvec agrees with dense oracle on random 20x20") {
  Rng rng(7);
  for (int trial = 0; trial < 3; ++trial) {
    const SparseMatrix M = random_sparse(20, 20, 0.3, rng);
    const Vector v = rng.gaussian_vector(20);
    const Vector a = matvec(M, v);
    const Vector b = dense_matvec(to_dense(M), 20, 20, v);
    for (int i = 0; i < 20; ++i)
      CHECK(std::abs(a[i] - b[i]) <= 1e-14 * std::max(1.0, std::abs(b[i])));
    // transpose identity, exact
    const Vector t1 = matvec_transpose(M, v);
    const Vector t2 = matvec(transpose(M), v);
    CHECK(t1 == t2);
  }
}

TEST_CASE("add, scale, block utils") {
  const SparseMatrix A = tridiag(3, -1, 2, -1);
  const SparseMatrix S = add(A, scale(A, -1.0));
  CHECK(S.nnz() == 0);
  const SparseMatrix BD = block_diag(identity(2), scale(identity(3), 2.0));
  CHECK(BD.rows == 5);
  CHECK(BD.at(0, 0) == 1.0);
  CHECK(BD.at(3, 3) == 2.0);
  const SparseMatrix V = vstack(identity(2), scale(identity(2), 3.0));
  CHECK(V.rows == 4);
  CHECK(V.at(2, 0) == 3.0);
  CHECK(asymmetry(A) == 0.0);
  const SparseMatrix N = from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, -1.0}});
  CHECK(asymmetry(N) == 2.0);
  CHECK(symmetric_part(N).nnz() == 0);
  const Vector cn = column_norms(from_triplets(2, 2, {{0, 0, 3.0}, {1, 0, 4.0}}));
  CHECK(cn[0] == doctest::Approx(5.0));
  CHECK(cn[1] == 0.0);
}

TEST_CASE("saddle validate") {
  SaddleProblem p;
  p.A = identity(3);
  p.B = from_triplets(3, 2, {{0, 0, 1.0}, {1, 1, 1.0}});
  p.D = identity(2);
  p.f = {1, 1, 1};
  p.g = {0, 0};
  CHECK_NOTHROW(validate(p));

  SaddleProblem bad = p;
  bad.A = from_triplets(3, 3, {{0, 1, 1.0}});
  CHECK_THROWS(validate(bad));  // asymmetric A with symmetric_a

  bad = p;
  bad.D = scale(identity(2), -1.0);
  CHECK_THROWS(validate(bad));  // indefinite D

  bad = p;
  bad.f = {1, 1};
  CHECK_THROWS(validate(bad));
}

TEST_CASE("matrix market round trip") {
  const std::string dir = std::filesystem::temp_directory_path().string();
  Rng rng(23);
  const SparseMatrix M = random_sparse(7, 5, 0.4, rng);
  const std::string p1 = dir + "/uzawa_mm_test_general.mtx";
  write_matrix_market(p1, M);
  const SparseMatrix R = read_matrix_market(p1);
  CHECK(R.rows == M.rows);
  CHECK(R.cols == M.cols);
  CHECK(R.col_idx == M.col_idx);
  CHECK(R.vals == M.vals);

  // symmetric round trip
  SparseMatrix S = add(random_sparse(6, 6, 0.3, rng), identity(6));
  S = symmetric_part(S);
  const std::string p2 = dir + "/uzawa_mm_test_sym.mtx";
  write_matrix_market(p2, S, true);
  const SparseMatrix R2 = read_matrix_market(p2);
  CHECK(R2.vals == S.vals);
  CHECK(R2.col_idx == S.col_idx);

  const Vector v = rng.gaussian_vector(9);
  const std::string p3 = dir + "/uzawa_mm_test_vec.mtx";
  write_vector_market(p3, v);
  CHECK(read_vector_market(p3) == v);
}

TEST_CASE("rng determinism") {
  Rng a(99), b(99);
  for (int i = 0; i < 50; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(99);
  const Vector g1 = c.gaussian_vector(10);
  Rng d(99);
  const Vector g2 = d.gaussian_vector(10);
  CHECK(g1 == g2);
}
