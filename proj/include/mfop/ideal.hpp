#pragma once

// Window diagnostics for the ideal I(H) of operators whose entries vanish
// uniformly in the tail, and the extraction procedure showing that any
// operator outside it generates everything.

#include <string>
#include <utility>
#include <vector>

#include "mfop/sparse_op.hpp"

namespace mfop {

/// values[t-1] = s(t) = max |a_ij| over i, j >= t (1-based t).
struct TailProfile {
  std::vector<double> values;
  double at(std::size_t t) const { return t == 0 || t > values.size() ? 0.0 : values[t - 1]; }
};

TailProfile tail_profile(const SparseOp& a);

struct IdealProductCheck {
  double epsilon = 0.0;        ///< s(n_split)
  std::size_t k = 0;           ///< profile(b).k()
  double b_norm = 0.0;
  double bound = 0.0;          ///< epsilon * k * ||b||
  std::size_t m_cut = 0;       ///< far columns are l >= m_cut (0-based)
  std::size_t far_entries = 0; ///< nonzero entries of ab in the far region
  double max_far_entry = 0.0;
  bool holds = true;           ///< max_far_entry <= bound + 1e-12
};

/// c = ab. With t = n_split (1-based), every row of b before t reaches only
/// columns < m_cut, so for i >= t and l >= m_cut, c_il only involves a_ij with
/// i, j >= t. Those entries are checked against epsilon k ||b||.
IdealProductCheck ideal_product_bound(const SparseOp& a, const SparseOp& b, std::size_t n_split);

struct L1Bound {
  double row_sup = 0.0;
  double col_sup = 0.0;
  double k_times_max = 0.0;  ///< profile.k() * max |a_ij|, dominates both sups
};

L1Bound l1_bound(const SparseOp& a);

/// Hermitian part, then entry (i, j) is kept iff it is among the k largest
/// moduli of row i and of column j (ties: lower index first).
SparseOp sparse_approximant(const SparseOp& a, std::size_t k);

enum class ExtractionCase { diagonal, offdiagonal };
std::string to_string(ExtractionCase c);

struct ExtractOptions {
  std::size_t tail_start = 1;      ///< 1-based; witnesses are taken from indices >= tail_start
  std::size_t min_selected = 2;    ///< fewer selected indices (or pairs) is InsufficientData
  double symmetry_tol = 1e-10;
};

struct ExtractionCertificate {
  ExtractionCase case_tag = ExtractionCase::diagonal;
  std::vector<std::size_t> selected;                          ///< diagonal case, 0-based
  std::vector<std::pair<std::size_t, std::size_t>> pairs;     ///< off-diagonal case, 0-based
  double delta = 0.0;
  std::size_t k = 0;
  double approx_error = 0.0;      ///< ||a - a^(k)||
  double approx_budget = 0.0;     ///< delta/4 or delta/6
  std::size_t n0 = 0;             ///< off-diagonal case: |a^(k)_ii| < delta/6 for all i >= n0
  std::vector<double> pair_sigma_min;
  double sigma_min = 0.0;         ///< smallest singular value of u* p_L a u
  SparseOp u;                     ///< u e_m = e_{index m}, window of a

  /// Indices of L in the order u packs them.
  std::vector<std::size_t> packed_indices() const;
};

ExtractionCertificate extract_diagonal_case(const SparseOp& a, double delta, std::size_t k, ExtractOptions opt = {});
ExtractionCertificate extract_offdiagonal_case(const SparseOp& a, double delta, std::size_t k, ExtractOptions opt = {});
/// Diagonal case first; on InsufficientData falls back to the off-diagonal case.
ExtractionCertificate extract(const SparseOp& a, double delta, std::size_t k, ExtractOptions opt = {});

/// Recomputes sigma_min(u* a u) by dense SVD of the compression.
double verify_certificate(const SparseOp& a, const ExtractionCertificate& cert);

/// Number of singular values of a strictly greater than `threshold`.
std::size_t count_singular_values_above(const SparseOp& a, double threshold);

}  // namespace mfop
