#include "uzawa/mm_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace uzawa {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

void write_matrix_market(const std::string& path, const SparseMatrix& M, bool symmetric) {
  std::ofstream out(path);
  require(out.good(), "write_matrix_market: cannot open " + path);
  out << "%%MatrixMarket matrix coordinate real "
      << (symmetric ? "symmetric" : "general") << "\n";
  int count = 0;
  if (symmetric) {
    require(M.rows == M.cols, "write_matrix_market: symmetric output needs square matrix");
    for (int r = 0; r < M.rows; ++r)
      for (int k = M.row_ptr[r]; k < M.row_ptr[r + 1]; ++k)
        if (M.col_idx[k] <= r) ++count;
  } else {
    count = M.nnz();
  }
  out << M.rows << " " << M.cols << " " << count << "\n";
  char buf[64];
  for (int r = 0; r < M.rows; ++r)
    for (int k = M.row_ptr[r]; k < M.row_ptr[r + 1]; ++k) {
      const int c = M.col_idx[k];
      if (symmetric && c > r) continue;
      std::snprintf(buf, sizeof buf, "%d %d %.17g\n", r + 1, c + 1, M.vals[k]);
      out << buf;
    }
  require(out.good(), "write_matrix_market: write failed for " + path);
}

SparseMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "read_matrix_market: cannot open " + path);
  std::string header;
  std::getline(in, header);
  const std::string h = lower(header);
  require(h.rfind("%%matrixmarket", 0) == 0, "read_matrix_market: bad header");
  require(h.find("matrix") != std::string::npos && h.find("coordinate") != std::string::npos &&
              h.find("real") != std::string::npos,
          "read_matrix_market: only coordinate real supported");
  const bool symmetric = h.find("symmetric") != std::string::npos;
  require(symmetric || h.find("general") != std::string::npos,
          "read_matrix_market: only general/symmetric supported");
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream dims(line);
  int rows = 0, cols = 0, count = 0;
  dims >> rows >> cols >> count;
  require(rows > 0 && cols > 0 && count >= 0, "read_matrix_market: bad size line");
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(count) * (symmetric ? 2 : 1));
  for (int k = 0; k < count; ++k) {
    int r = 0, c = 0;
    double v = 0.0;
    in >> r >> c >> v;
    require(in.good() || in.eof(), "read_matrix_market: truncated entries");
    trips.push_back({r - 1, c - 1, v});
    if (symmetric && r != c) trips.push_back({c - 1, r - 1, v});
  }
  return from_triplets(rows, cols, std::move(trips));
}

void write_vector_market(const std::string& path, const Vector& v) {
  std::ofstream out(path);
  require(out.good(), "write_vector_market: cannot open " + path);
  out << "%%MatrixMarket matrix array real general\n";
  out << v.size() << " 1\n";
  char buf[48];
  for (double x : v) {
    std::snprintf(buf, sizeof buf, "%.17g\n", x);
    out << buf;
  }
  require(out.good(), "write_vector_market: write failed for " + path);
}

Vector read_vector_market(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "read_vector_market: cannot open " + path);
  std::string header;
  std::getline(in, header);
  const std::string h = lower(header);
  require(h.rfind("%%matrixmarket", 0) == 0 && h.find("array") != std::string::npos,
          "read_vector_market: bad header");
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream dims(line);
  int rows = 0, cols = 0;
  dims >> rows >> cols;
  require(rows > 0 && cols == 1, "read_vector_market: expected n by 1");
  Vector v(static_cast<std::size_t>(rows));
  for (double& x : v) in >> x;
  require(in.good() || in.eof(), "read_vector_market: truncated entries");
  return v;
}

}  // namespace uzawa
