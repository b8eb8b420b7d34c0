#pragma once

// Finite-window truncations of matrix-finite operators.
//
// A SparseOp is an N x N complex matrix on the window e_0..e_{N-1} of the
// fixed basis, stored simultaneously by rows (CSR) and by columns (CSC).
// Stored entries are exactly nonzero, and the sparsity profile (max entries
// per row / per column) is computed at construction, so it is exact rather
// than an estimate. Values are immutable once built.
//
// Indices are 0-based in the API; file formats and CLI output are 1-based.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mfop {

using Complex = std::complex<double>;

struct Triplet {
  std::size_t row;
  std::size_t col;
  Complex value;
};

/// (max nonzeros in any row, max nonzeros in any column).
struct SparsityProfile {
  std::size_t row_max = 0;
  std::size_t col_max = 0;

  std::size_t k() const noexcept { return row_max > col_max ? row_max : col_max; }
  SparsityProfile swapped() const noexcept { return {col_max, row_max}; }
  bool fits(const SparsityProfile& bound) const noexcept {
    return row_max <= bound.row_max && col_max <= bound.col_max;
  }
  friend bool operator==(const SparsityProfile&, const SparsityProfile&) = default;
};

class SparseOp {
 public:
  SparseOp() = default;
  /// Zero operator on a window of size `window`.
  explicit SparseOp(std::size_t window);

  /// Duplicate coordinates are summed; entries that end up exactly zero are dropped.
  static SparseOp from_triplets(std::size_t window, std::vector<Triplet> entries);
  /// Takes already-canonical CSR arrays (sorted columns, no duplicates, no zeros).
  static SparseOp from_csr(std::size_t window, std::vector<std::size_t> row_ptr,
                           std::vector<std::size_t> col_idx, std::vector<Complex> values);
  static SparseOp identity(std::size_t window);
  static SparseOp diagonal(std::span<const Complex> diag);

  std::size_t window() const noexcept { return window_; }
  std::size_t nnz() const noexcept { return row_vals_.size(); }
  SparsityProfile profile() const noexcept { return profile_; }
  bool is_zero() const noexcept { return row_vals_.empty(); }

  Complex at(std::size_t i, std::size_t j) const;
  double max_abs() const noexcept;

  std::span<const std::size_t> row_cols(std::size_t i) const;
  std::span<const Complex> row_values(std::size_t i) const;
  std::span<const std::size_t> col_rows(std::size_t j) const;
  std::span<const Complex> col_values(std::size_t j) const;

  const std::vector<std::size_t>& row_ptr() const noexcept { return row_ptr_; }
  const std::vector<std::size_t>& col_idx() const noexcept { return col_idx_; }
  const std::vector<Complex>& values() const noexcept { return row_vals_; }
  const std::vector<std::size_t>& col_ptr() const noexcept { return col_ptr_; }
  const std::vector<std::size_t>& row_idx() const noexcept { return row_idx_; }
  const std::vector<Complex>& col_values_flat() const noexcept { return col_vals_; }

  /// Entries sorted by (row, col).
  std::vector<Triplet> triplets() const;
  /// Column j as a dense vector of length window().
  std::vector<Complex> column(std::size_t j) const;

  friend bool operator==(const SparseOp& a, const SparseOp& b);

 private:
  void build_columns();
  void compute_profile();

  std::size_t window_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<Complex> row_vals_;
  std::vector<std::size_t> col_ptr_{0};
  std::vector<std::size_t> row_idx_;
  std::vector<Complex> col_vals_;
  SparsityProfile profile_;
};

/// Profile recomputed from a raw entry list (zeros ignored); used to audit `profile()`.
SparsityProfile measured_profile(std::size_t window, std::span<const Triplet> entries);

SparseOp add(const SparseOp& a, const SparseOp& b);
SparseOp subtract(const SparseOp& a, const SparseOp& b);
SparseOp scale(const SparseOp& a, Complex factor);
/// Matrix product. Dispatches to the OpenMP kernel for large windows when available.
SparseOp mul(const SparseOp& a, const SparseOp& b);
SparseOp adjoint(const SparseOp& a);

inline SparseOp operator+(const SparseOp& a, const SparseOp& b) { return add(a, b); }
inline SparseOp operator-(const SparseOp& a, const SparseOp& b) { return subtract(a, b); }
inline SparseOp operator*(const SparseOp& a, const SparseOp& b) { return mul(a, b); }
inline SparseOp operator*(Complex s, const SparseOp& a) { return scale(a, s); }

/// Bounds guaranteed by the closure lemmas for sums and products.
SparsityProfile sum_profile_bound(const SparsityProfile& a, const SparsityProfile& b) noexcept;
SparsityProfile product_profile_bound(const SparsityProfile& a, const SparsityProfile& b) noexcept;

/// Largest |a_ij - b_ij| over the union of supports.
double max_entry_distance(const SparseOp& a, const SparseOp& b);

/// a = a^(1) + ... + a^(k), each part with at most one entry per row.
struct LineDecomposition {
  std::vector<SparseOp> parts;
};

/// Part m holds the m-th stored entry (ascending column) of every row.
LineDecomposition line_decompose(const SparseOp& a);
SparseOp reassemble(const LineDecomposition& d, std::size_t window);

struct NormBound {
  double value = 0.0;         ///< C * k^{3/2}
  double max_modulus = 0.0;   ///< C
  std::size_t k = 0;          ///< max(row_max, col_max)
  bool k_from_columns = false;
  double refined = 0.0;       ///< C * min(r*sqrt(c), c*sqrt(r)), r/c the row/col maxima
};

/// Upper bound C k^{3/2} from the line decomposition. Always >= operator_norm(a).
NormBound norm_upper_bound(const SparseOp& a);

/// Largest singular value by power iteration on a*a from a deterministic start,
/// with Rayleigh-Ritz acceleration over the iterates. Stops once the Ritz
/// residual for sigma^2 is below tol * sigma^2.
double operator_norm(const SparseOp& a, double tol = 1e-10, std::size_t max_iter = 200000);

/// l2 distance from x to the set of k-sparse vectors (ties: lowest index kept).
double best_k_sparse_column_error(std::span<const Complex> x, std::size_t k);

/// a (x) 1_m: each basis index i becomes the m interleaved indices i*m + r.
SparseOp embed_block(const SparseOp& a, std::size_t m);
/// m x m block operator matrix flattened by (block r, index i) -> i*m + r.
SparseOp embed_blocks(const std::vector<std::vector<SparseOp>>& blocks);

/// Keeps entries with both indices < r.
SparseOp truncate_compact(const SparseOp& a, std::size_t r);
/// Drops entries with |a_ij| <= eps. Never applied implicitly by other operations.
SparseOp prune(const SparseOp& a, double eps);
/// Sub-matrix a[rows, cols]; rows and cols must have equal length, which becomes the window.
SparseOp compress(const SparseOp& a, std::span<const std::size_t> rows, std::span<const std::size_t> cols);
/// Enlarge the window to `window` (>= a.window()), new indices map to zero.
SparseOp extend_window(const SparseOp& a, std::size_t window);

}  // namespace mfop
