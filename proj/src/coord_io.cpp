#include "mfop/coord_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "mfop/error.hpp"

namespace mfop {

namespace {

// Next line that is neither blank nor a '%' / '#' comment.
bool next_data_line(std::istream& in, std::string& line, std::size_t& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '%' || line[pos] == '#') continue;
    return true;
  }
  return false;
}

}  // namespace

SparseOp read_coordinate(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!next_data_line(in, line, lineno)) throw ParseError("coordinate: missing header line");
  std::istringstream header(line);
  long long n = -1, nnz = -1;
  if (!(header >> n >> nnz) || n < 0 || nnz < 0) {
    throw ParseError("coordinate: bad header at line " + std::to_string(lineno));
  }
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(nnz));
  for (long long e = 0; e < nnz; ++e) {
    if (!next_data_line(in, line, lineno)) {
      throw ParseError("coordinate: expected " + std::to_string(nnz) + " entries, got " + std::to_string(e));
    }
    std::istringstream row(line);
    long long i = 0, j = 0;
    double re = 0.0, im = 0.0;
    if (!(row >> i >> j >> re >> im)) throw ParseError("coordinate: bad entry at line " + std::to_string(lineno));
    if (i < 1 || j < 1 || i > n || j > n) {
      throw ParseError("coordinate: index out of range at line " + std::to_string(lineno));
    }
    entries.push_back({static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1), Complex(re, im)});
  }
  return SparseOp::from_triplets(static_cast<std::size_t>(n), std::move(entries));
}

void write_coordinate(std::ostream& out, const SparseOp& a) {
  out << a.window() << ' ' << a.nnz() << '\n';
  char buf[96];
  for (const auto& t : a.triplets()) {
    std::snprintf(buf, sizeof buf, "%zu %zu %.17g %.17g\n", t.row + 1, t.col + 1, t.value.real(), t.value.imag());
    out << buf;
  }
}

SparseOp read_coordinate_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_coordinate(in);
}

void write_coordinate_file(const std::filesystem::path& path, const SparseOp& a) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_coordinate(out, a);
}

}  // namespace mfop
