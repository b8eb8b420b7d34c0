#include "mfop/ideal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mfop/dense.hpp"
#include "mfop/error.hpp"

namespace mfop {

TailProfile tail_profile(const SparseOp& a) {
  TailProfile tp;
  tp.values.assign(a.window(), 0.0);
  for (std::size_t i = 0; i < a.window(); ++i) {
    const auto cols = a.row_cols(i);
    const auto vals = a.row_values(i);
    for (std::size_t q = 0; q < cols.size(); ++q) {
      const std::size_t key = std::min(i, cols[q]);
      tp.values[key] = std::max(tp.values[key], std::abs(vals[q]));
    }
  }
  for (std::size_t t = a.window(); t-- > 1;) tp.values[t - 1] = std::max(tp.values[t - 1], tp.values[t]);
  return tp;
}

IdealProductCheck ideal_product_bound(const SparseOp& a, const SparseOp& b, std::size_t n_split) {
  if (a.window() != b.window()) throw DimensionError("ideal_product_bound: window mismatch");
  if (n_split == 0 || n_split > a.window()) throw DimensionError("ideal_product_bound: n_split outside window");
  IdealProductCheck r;
  const std::size_t t0 = n_split - 1;
  r.epsilon = tail_profile(a).at(n_split);
  r.k = b.profile().k();
  r.b_norm = b.is_zero() ? 0.0 : operator_norm(b);
  r.bound = r.epsilon * static_cast<double>(r.k) * r.b_norm;
  for (std::size_t j = 0; j < t0; ++j) {
    const auto cols = b.row_cols(j);
    if (!cols.empty()) r.m_cut = std::max(r.m_cut, cols.back() + 1);
  }
  const SparseOp c = a * b;
  for (std::size_t i = t0; i < c.window(); ++i) {
    const auto cols = c.row_cols(i);
    const auto vals = c.row_values(i);
    for (std::size_t q = 0; q < cols.size(); ++q) {
      if (cols[q] < r.m_cut) continue;
      ++r.far_entries;
      r.max_far_entry = std::max(r.max_far_entry, std::abs(vals[q]));
    }
  }
  r.holds = r.max_far_entry <= r.bound + 1e-12;
  return r;
}

L1Bound l1_bound(const SparseOp& a) {
  L1Bound r;
  for (std::size_t i = 0; i < a.window(); ++i) {
    double rs = 0.0, cs = 0.0;
    for (const auto& z : a.row_values(i)) rs += std::abs(z);
    for (const auto& z : a.col_values(i)) cs += std::abs(z);
    r.row_sup = std::max(r.row_sup, rs);
    r.col_sup = std::max(r.col_sup, cs);
  }
  r.k_times_max = static_cast<double>(a.profile().k()) * a.max_abs();
  return r;
}

namespace {

// Positions (within the span) of the k largest moduli; ties keep the lower position.
std::vector<std::size_t> top_k_positions(std::span<const Complex> vals, std::size_t k) {
  std::vector<std::size_t> pos(vals.size());
  std::iota(pos.begin(), pos.end(), std::size_t{0});
  std::stable_sort(pos.begin(), pos.end(), [&](std::size_t x, std::size_t y) { return std::abs(vals[x]) > std::abs(vals[y]); });
  if (pos.size() > k) pos.resize(k);
  return pos;
}

void require_self_adjoint(const SparseOp& a, double tol) {
  const double asym = max_entry_distance(a, adjoint(a));
  if (asym > tol) throw ContractViolation("extraction: operator is not self-adjoint (max |a - a*| = " + std::to_string(asym) + ")");
}

SparseOp packing_isometry(std::size_t window, const std::vector<std::size_t>& idx) {
  std::vector<Triplet> t;
  for (std::size_t m = 0; m < idx.size(); ++m) t.push_back({idx[m], m, 1.0});
  return SparseOp::from_triplets(window, std::move(t));
}

double compressed_sigma_min(const SparseOp& a, const std::vector<std::size_t>& idx) {
  return dense::sigma_min(dense::to_dense(compress(a, idx, idx)));
}

// Approximant plus its certified distance; throws when the budget is missed.
SparseOp certified_approximant(const SparseOp& a, std::size_t k, double budget, double& err) {
  SparseOp ak = sparse_approximant(a, k);
  err = dense::norm(a - ak);
  if (!(err < budget))
    throw ApproximationBudgetError("extraction: ||a - a^(k)|| = " + std::to_string(err) + " misses budget " +
                                       std::to_string(budget) + " at k = " + std::to_string(k),
                                   err, budget);
  return ak;
}

void block_row_support(const SparseOp& ak, std::size_t i, std::vector<bool>& blocked) {
  for (auto c : ak.row_cols(i)) blocked[c] = true;
  blocked[i] = true;
}

}  // namespace

SparseOp sparse_approximant(const SparseOp& a, std::size_t k) {
  const SparseOp h = scale(a + adjoint(a), 0.5);
  const std::size_t n = h.window();
  // keep_col[j] holds the rows that make the top-k of column j.
  std::vector<std::vector<std::size_t>> keep_col(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto rows = h.col_rows(j);
    for (auto p : top_k_positions(h.col_values(j), k)) keep_col[j].push_back(rows[p]);
    std::sort(keep_col[j].begin(), keep_col[j].end());
  }
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    const auto cols = h.row_cols(i);
    const auto vals = h.row_values(i);
    for (auto p : top_k_positions(vals, k)) {
      const auto& kc = keep_col[cols[p]];
      if (std::binary_search(kc.begin(), kc.end(), i)) t.push_back({i, cols[p], vals[p]});
    }
  }
  return SparseOp::from_triplets(n, std::move(t));
}

std::string to_string(ExtractionCase c) { return c == ExtractionCase::diagonal ? "diagonal" : "offdiagonal"; }

std::vector<std::size_t> ExtractionCertificate::packed_indices() const {
  if (case_tag == ExtractionCase::diagonal) return selected;
  std::vector<std::size_t> idx;
  for (const auto& [i, j] : pairs) {
    idx.push_back(i);
    idx.push_back(j);
  }
  return idx;
}

ExtractionCertificate extract_diagonal_case(const SparseOp& a, double delta, std::size_t k, ExtractOptions opt) {
  if (!(delta > 0.0)) throw ContractViolation("extraction: delta must be positive");
  require_self_adjoint(a, opt.symmetry_tol);
  const std::size_t n = a.window();
  const std::size_t start = opt.tail_start == 0 ? 0 : opt.tail_start - 1;

  // |a^(k)_ii| > 3 delta/4 with ||a - a^(k)|| < delta/4 forces |a_ii| > delta/2.
  std::size_t candidates = 0;
  for (std::size_t i = start; i < n; ++i)
    if (std::abs(a.at(i, i)) > delta / 2) ++candidates;
  if (candidates < opt.min_selected)
    throw InsufficientData("diagonal case: " + std::to_string(candidates) + " diagonal witnesses above delta/2 in the tail");

  ExtractionCertificate cert;
  cert.case_tag = ExtractionCase::diagonal;
  cert.delta = delta;
  cert.k = k;
  cert.approx_budget = delta / 4;
  const SparseOp ak = certified_approximant(a, k, cert.approx_budget, cert.approx_error);

  std::vector<bool> blocked(n, false);
  for (std::size_t i = start; i < n; ++i) {
    if (blocked[i] || !(std::abs(ak.at(i, i)) > 0.75 * delta)) continue;
    cert.selected.push_back(i);
    block_row_support(ak, i, blocked);
  }
  if (cert.selected.size() < opt.min_selected)
    throw InsufficientData("diagonal case: selected " + std::to_string(cert.selected.size()) + " indices");
  cert.u = packing_isometry(n, cert.selected);
  cert.sigma_min = compressed_sigma_min(a, cert.selected);
  return cert;
}

ExtractionCertificate extract_offdiagonal_case(const SparseOp& a, double delta, std::size_t k, ExtractOptions opt) {
  if (!(delta > 0.0)) throw ContractViolation("extraction: delta must be positive");
  require_self_adjoint(a, opt.symmetry_tol);
  const std::size_t n = a.window();
  const std::size_t start = opt.tail_start == 0 ? 0 : opt.tail_start - 1;

  // |a^(k)_ij| > 5 delta/6 with ||a - a^(k)|| < delta/6 forces |a_ij| > 2 delta/3.
  std::size_t candidates = 0;
  for (std::size_t i = start; i < n; ++i) {
    const auto cols = a.row_cols(i);
    const auto vals = a.row_values(i);
    for (std::size_t q = 0; q < cols.size(); ++q)
      if (cols[q] > i && std::abs(vals[q]) > 2 * delta / 3) ++candidates;
  }
  if (candidates < opt.min_selected)
    throw InsufficientData("off-diagonal case: " + std::to_string(candidates) + " off-diagonal witnesses above 2delta/3 in the tail");

  ExtractionCertificate cert;
  cert.case_tag = ExtractionCase::offdiagonal;
  cert.delta = delta;
  cert.k = k;
  cert.approx_budget = delta / 6;
  const SparseOp ak = certified_approximant(a, k, cert.approx_budget, cert.approx_error);

  for (std::size_t i = n; i-- > 0;) {
    if (std::abs(ak.at(i, i)) >= delta / 6) {
      cert.n0 = i + 1;
      break;
    }
  }
  const std::size_t lo = std::max(cert.n0, start);
  std::vector<bool> blocked(n, false);
  for (std::size_t i = lo; i < n; ++i) {
    if (blocked[i]) continue;
    const auto cols = ak.row_cols(i);
    const auto vals = ak.row_values(i);
    for (std::size_t q = 0; q < cols.size(); ++q) {
      const std::size_t j = cols[q];
      if (j < lo || j == i || blocked[j] || !(std::abs(vals[q]) > 5 * delta / 6)) continue;
      cert.pairs.emplace_back(i, j);
      block_row_support(ak, i, blocked);
      block_row_support(ak, j, blocked);
      Eigen::Matrix2cd blk;
      blk << ak.at(i, i), ak.at(i, j), ak.at(j, i), ak.at(j, j);
      cert.pair_sigma_min.push_back(dense::sigma_min(Eigen::MatrixXcd(blk)));
      break;
    }
  }
  if (cert.pairs.size() < opt.min_selected)
    throw InsufficientData("off-diagonal case: selected " + std::to_string(cert.pairs.size()) + " pairs");
  const auto idx = cert.packed_indices();
  cert.u = packing_isometry(n, idx);
  cert.sigma_min = compressed_sigma_min(a, idx);
  return cert;
}

ExtractionCertificate extract(const SparseOp& a, double delta, std::size_t k, ExtractOptions opt) {
  try {
    return extract_diagonal_case(a, delta, k, opt);
  } catch (const InsufficientData&) {
    return extract_offdiagonal_case(a, delta, k, opt);
  }
}

double verify_certificate(const SparseOp& a, const ExtractionCertificate& cert) {
  const auto idx = cert.packed_indices();
  const SparseOp c = mul(adjoint(cert.u), mul(a, cert.u));
  std::vector<std::size_t> head(idx.size());
  std::iota(head.begin(), head.end(), std::size_t{0});
  return dense::sigma_min(dense::to_dense(compress(c, head, head)));
}

std::size_t count_singular_values_above(const SparseOp& a, double threshold) {
  const auto sv = dense::singular_values(a);
  return static_cast<std::size_t>(std::count_if(sv.begin(), sv.end(), [&](double s) { return s > threshold; }));
}

}  // namespace mfop
