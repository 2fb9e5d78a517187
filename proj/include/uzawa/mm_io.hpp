#pragma once

#include <string>

#include "uzawa/csr.hpp"

namespace uzawa {

// Matrix Market coordinate format, 1-based indices.
// symmetric=true writes the lower triangle with a "symmetric" header.
void write_matrix_market(const std::string& path, const SparseMatrix& M,
                         bool symmetric = false);
// Reads "general" or "symmetric" coordinate files.
SparseMatrix read_matrix_market(const std::string& path);

// Dense vectors in Matrix Market array format (n by 1).
void write_vector_market(const std::string& path, const Vector& v);
Vector read_vector_market(const std::string& path);

}  // namespace uzawa
