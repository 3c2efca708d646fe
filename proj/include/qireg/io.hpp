#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qireg/dense_matrix.hpp"

namespace qireg {

// Matrix input, auto-detected:
//  - coordinate text: first data line "m n nnz", then nnz lines "i j value"
//    with 0-based indices;
//  - dense CSV: comma-separated rows (detected by a comma in the first
//    data line).
// '#' starts a comment; blank lines are skipped.
DenseMatrix read_matrix(const std::string& path);
DenseMatrix read_matrix_stream(std::istream& in, const std::string& origin);

// Vector input: one value per line, '#' comments.
std::vector<double> read_vector(const std::string& path);
std::vector<double> read_vector_stream(std::istream& in, const std::string& origin);

void write_matrix_coord(const std::string& path, const DenseMatrix& a);
void write_vector(const std::string& path, const std::vector<double>& v);

}  // namespace qireg
