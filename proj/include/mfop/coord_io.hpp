#pragma once

// Coordinate text format:
//
//   N nnz
//   i j re im        (nnz lines, 1-based indices, whitespace separated)
//
// Writers emit entries sorted by (i, j) with 17 significant digits.

#include <filesystem>
#include <iosfwd>

#include "mfop/sparse_op.hpp"

namespace mfop {

SparseOp read_coordinate(std::istream& in);
void write_coordinate(std::ostream& out, const SparseOp& a);

SparseOp read_coordinate_file(const std::filesystem::path& path);
void write_coordinate_file(const std::filesystem::path& path, const SparseOp& a);

}  // namespace mfop
