#include "mfop/sparse_op.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mfop/error.hpp"
#include "mfop/kernels.hpp"

namespace mfop {

namespace {

void require_same_window(const SparseOp& a, const SparseOp& b, const char* op) {
  if (a.window() != b.window()) {
    throw DimensionError(std::string(op) + ": window mismatch (" + std::to_string(a.window()) + " vs " +
                         std::to_string(b.window()) + ")");
  }
}

void require_index(std::size_t index, std::size_t window, const char* what) {
  if (index >= window) {
    throw DimensionError(std::string(what) + " index " + std::to_string(index) + " outside window " +
                         std::to_string(window));
  }
}

}  // namespace

SparseOp::SparseOp(std::size_t window) : window_(window), row_ptr_(window + 1, 0), col_ptr_(window + 1, 0) {}

SparseOp SparseOp::from_triplets(std::size_t window, std::vector<Triplet> entries) {
  for (const auto& t : entries) {
    require_index(t.row, window, "row");
    require_index(t.col, window, "column");
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& x, const Triplet& y) {
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  });

  std::vector<std::size_t> row_ptr(window + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<Complex> vals;
  cols.reserve(entries.size());
  vals.reserve(entries.size());

  std::size_t p = 0;
  while (p < entries.size()) {
    const std::size_t i = entries[p].row;
    const std::size_t j = entries[p].col;
    Complex sum = entries[p].value;
    std::size_t q = p + 1;
    while (q < entries.size() && entries[q].row == i && entries[q].col == j) {
      sum += entries[q].value;
      ++q;
    }
    if (sum != Complex(0.0, 0.0)) {
      cols.push_back(j);
      vals.push_back(sum);
      ++row_ptr[i + 1];
    }
    p = q;
  }
  std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
  return from_csr(window, std::move(row_ptr), std::move(cols), std::move(vals));
}

SparseOp SparseOp::from_csr(std::size_t window, std::vector<std::size_t> row_ptr, std::vector<std::size_t> col_idx,
                            std::vector<Complex> values) {
  if (row_ptr.size() != window + 1 || col_idx.size() != values.size() || row_ptr.back() != values.size()) {
    throw DimensionError("from_csr: inconsistent CSR arrays");
  }
  SparseOp op;
  op.window_ = window;
  op.row_ptr_ = std::move(row_ptr);
  op.col_idx_ = std::move(col_idx);
  op.row_vals_ = std::move(values);
  op.build_columns();
  op.compute_profile();
  return op;
}

SparseOp SparseOp::identity(std::size_t window) {
  std::vector<std::size_t> row_ptr(window + 1);
  std::iota(row_ptr.begin(), row_ptr.end(), std::size_t{0});
  std::vector<std::size_t> cols(window);
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  return from_csr(window, std::move(row_ptr), std::move(cols), std::vector<Complex>(window, Complex(1.0, 0.0)));
}

SparseOp SparseOp::diagonal(std::span<const Complex> diag) {
  std::vector<Triplet> t;
  t.reserve(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) t.push_back({i, i, diag[i]});
  return from_triplets(diag.size(), std::move(t));
}

void SparseOp::build_columns() {
  col_ptr_.assign(window_ + 1, 0);
  for (std::size_t c : col_idx_) ++col_ptr_[c + 1];
  std::partial_sum(col_ptr_.begin(), col_ptr_.end(), col_ptr_.begin());
  row_idx_.assign(col_idx_.size(), 0);
  col_vals_.assign(col_idx_.size(), Complex{});
  std::vector<std::size_t> next(col_ptr_.begin(), col_ptr_.end() - 1);
  // Rows are visited in ascending order, so each column list comes out sorted.
  for (std::size_t i = 0; i < window_; ++i) {
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      const std::size_t dst = next[col_idx_[p]]++;
      row_idx_[dst] = i;
      col_vals_[dst] = row_vals_[p];
    }
  }
}

void SparseOp::compute_profile() {
  profile_ = {};
  for (std::size_t i = 0; i < window_; ++i) {
    profile_.row_max = std::max(profile_.row_max, row_ptr_[i + 1] - row_ptr_[i]);
    profile_.col_max = std::max(profile_.col_max, col_ptr_[i + 1] - col_ptr_[i]);
  }
}

Complex SparseOp::at(std::size_t i, std::size_t j) const {
  require_index(i, window_, "row");
  require_index(j, window_, "column");
  const auto cols = row_cols(i);
  const auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return {};
  return row_vals_[row_ptr_[i] + static_cast<std::size_t>(it - cols.begin())];
}

double SparseOp::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& v : row_vals_) m = std::max(m, std::abs(v));
  return m;
}

std::span<const std::size_t> SparseOp::row_cols(std::size_t i) const {
  return {col_idx_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
}
std::span<const Complex> SparseOp::row_values(std::size_t i) const {
  return {row_vals_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
}
std::span<const std::size_t> SparseOp::col_rows(std::size_t j) const {
  return {row_idx_.data() + col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j]};
}
std::span<const Complex> SparseOp::col_values(std::size_t j) const {
  return {col_vals_.data() + col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j]};
}

std::vector<Triplet> SparseOp::triplets() const {
  std::vector<Triplet> out;
  out.reserve(nnz());
  for (std::size_t i = 0; i < window_; ++i) {
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) out.push_back({i, col_idx_[p], row_vals_[p]});
  }
  return out;
}

std::vector<Complex> SparseOp::column(std::size_t j) const {
  require_index(j, window_, "column");
  std::vector<Complex> x(window_);
  const auto rows = col_rows(j);
  const auto vals = col_values(j);
  for (std::size_t p = 0; p < rows.size(); ++p) x[rows[p]] = vals[p];
  return x;
}

bool operator==(const SparseOp& a, const SparseOp& b) {
  return a.window_ == b.window_ && a.row_ptr_ == b.row_ptr_ && a.col_idx_ == b.col_idx_ && a.row_vals_ == b.row_vals_;
}

SparsityProfile measured_profile(std::size_t window, std::span<const Triplet> entries) {
  std::vector<std::size_t> rows(window, 0), cols(window, 0);
  for (const auto& t : entries) {
    if (t.value == Complex(0.0, 0.0)) continue;
    ++rows.at(t.row);
    ++cols.at(t.col);
  }
  SparsityProfile p;
  for (std::size_t i = 0; i < window; ++i) {
    p.row_max = std::max(p.row_max, rows[i]);
    p.col_max = std::max(p.col_max, cols[i]);
  }
  return p;
}

namespace {

// Row-wise merge of two CSR operators; `sign` multiplies b.
SparseOp merge_rows(const SparseOp& a, const SparseOp& b, double sign) {
  const std::size_t n = a.window();
  std::vector<std::size_t> row_ptr(n + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<Complex> vals;
  cols.reserve(a.nnz() + b.nnz());
  vals.reserve(a.nnz() + b.nnz());
  for (std::size_t i = 0; i < n; ++i) {
    const auto ac = a.row_cols(i), bc = b.row_cols(i);
    const auto av = a.row_values(i), bv = b.row_values(i);
    std::size_t p = 0, q = 0;
    while (p < ac.size() || q < bc.size()) {
      std::size_t j;
      Complex v;
      if (q == bc.size() || (p < ac.size() && ac[p] < bc[q])) {
        j = ac[p];
        v = av[p++];
      } else if (p == ac.size() || bc[q] < ac[p]) {
        j = bc[q];
        v = sign * bv[q++];
      } else {
        j = ac[p];
        v = av[p++] + sign * bv[q++];
      }
      if (v != Complex(0.0, 0.0)) {
        cols.push_back(j);
        vals.push_back(v);
      }
    }
    row_ptr[i + 1] = cols.size();
  }
  return SparseOp::from_csr(n, std::move(row_ptr), std::move(cols), std::move(vals));
}

}  // namespace

SparseOp add(const SparseOp& a, const SparseOp& b) {
  require_same_window(a, b, "add");
  return merge_rows(a, b, 1.0);
}

SparseOp subtract(const SparseOp& a, const SparseOp& b) {
  require_same_window(a, b, "subtract");
  return merge_rows(a, b, -1.0);
}

SparseOp scale(const SparseOp& a, Complex factor) {
  std::vector<Triplet> t = a.triplets();
  for (auto& e : t) e.value *= factor;
  return SparseOp::from_triplets(a.window(), std::move(t));
}

SparseOp mul(const SparseOp& a, const SparseOp& b) {
  require_same_window(a, b, "mul");
  if (a.window() >= kernels::kParallelThreshold) return kernels::spmm_omp(a, b);
  return kernels::spmm_serial(a, b);
}

SparseOp adjoint(const SparseOp& a) {
  // Column storage of a is the row storage of a*, up to conjugation.
  std::vector<Complex> vals(a.col_values_flat().size());
  std::transform(a.col_values_flat().begin(), a.col_values_flat().end(), vals.begin(),
                 [](const Complex& v) { return std::conj(v); });
  return SparseOp::from_csr(a.window(), a.col_ptr(), a.row_idx(), std::move(vals));
}

SparsityProfile sum_profile_bound(const SparsityProfile& a, const SparsityProfile& b) noexcept {
  return {a.row_max + b.row_max, a.col_max + b.col_max};
}

SparsityProfile product_profile_bound(const SparsityProfile& a, const SparsityProfile& b) noexcept {
  return {a.row_max * b.row_max, a.col_max * b.col_max};
}

double max_entry_distance(const SparseOp& a, const SparseOp& b) {
  require_same_window(a, b, "max_entry_distance");
  return subtract(a, b).max_abs();
}

LineDecomposition line_decompose(const SparseOp& a) {
  const std::size_t k = a.profile().row_max;
  std::vector<std::vector<Triplet>> parts(k);
  for (std::size_t i = 0; i < a.window(); ++i) {
    const auto cols = a.row_cols(i);
    const auto vals = a.row_values(i);
    for (std::size_t m = 0; m < cols.size(); ++m) parts[m].push_back({i, cols[m], vals[m]});
  }
  LineDecomposition d;
  d.parts.reserve(k);
  for (auto& p : parts) d.parts.push_back(SparseOp::from_triplets(a.window(), std::move(p)));
  return d;
}

SparseOp reassemble(const LineDecomposition& d, std::size_t window) {
  SparseOp sum(window);
  for (const auto& p : d.parts) sum = add(sum, p);
  return sum;
}

NormBound norm_upper_bound(const SparseOp& a) {
  NormBound b;
  const auto prof = a.profile();
  b.max_modulus = a.max_abs();
  b.k = prof.k();
  b.k_from_columns = prof.col_max > prof.row_max;
  const double k = static_cast<double>(b.k);
  b.value = b.max_modulus * k * std::sqrt(k);
  const double r = static_cast<double>(prof.row_max);
  const double c = static_cast<double>(prof.col_max);
  b.refined = b.max_modulus * std::min(r * std::sqrt(c), c * std::sqrt(r));
  return b;
}

double operator_norm(const SparseOp& a, double tol, std::size_t max_iter) {
  if (tol <= 0.0) throw ContractViolation("operator_norm: tol must be positive");
  const std::size_t n = a.window();
  if (a.is_zero()) return 0.0;

  const bool parallel = n >= kernels::kParallelThreshold;
  std::vector<Complex> tmp(n);
  // w = a* a v
  auto apply_gram = [&](std::span<const Complex> v, std::span<Complex> w) {
    if (parallel) {
      kernels::spmv_omp(a, v, tmp);
      kernels::spmv_adjoint_omp(a, tmp, w);
    } else {
      kernels::spmv_serial(a, v, tmp);
      kernels::spmv_adjoint_serial(a, tmp, w);
    }
  };
  auto dot = [](std::span<const Complex> u, std::span<const Complex> v) {
    Complex s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
    return s;
  };
  auto norm2 = [&](std::span<const Complex> v) { return std::sqrt(std::max(dot(v, v).real(), 0.0)); };

  std::vector<Complex> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = Complex(1.0 + 0.1 * static_cast<double>(i % 7) + 1e-3 * static_cast<double>(i), 0.0);
  }

  // Power iteration on a*a, accelerated by Rayleigh-Ritz on the Krylov space of
  // the iterates (explicitly restarted Lanczos with full reorthogonalization).
  const std::size_t m = std::min<std::size_t>(n, 24);
  std::vector<std::vector<Complex>> basis(m + 1, std::vector<Complex>(n));
  std::vector<double> alpha(m), beta(m);
  double theta = 0.0;
  std::size_t matvecs = 0;
  while (matvecs < max_iter) {
    const double nx = norm2(x);
    for (std::size_t i = 0; i < n; ++i) basis[0][i] = x[i] / nx;
    std::size_t dim = 0;
    bool invariant = false;
    for (std::size_t j = 0; j < m; ++j) {
      auto& w = basis[j + 1];
      apply_gram(basis[j], w);
      ++matvecs;
      alpha[j] = dot(basis[j], w).real();
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t q = 0; q <= j; ++q) {
          const Complex c = dot(basis[q], w);
          for (std::size_t i = 0; i < n; ++i) w[i] -= c * basis[q][i];
        }
      }
      beta[j] = norm2(w);
      dim = j + 1;
      if (beta[j] <= 1e-14 * std::max(alpha[0], std::abs(alpha[j]))) {
        invariant = true;
        break;
      }
      for (auto& v : w) v /= beta[j];
    }

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t j = 0; j < dim; ++j) {
      const auto e = static_cast<Eigen::Index>(j);
      t(e, e) = alpha[j];
      if (j + 1 < dim) t(e, e + 1) = t(e + 1, e) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const auto top = static_cast<Eigen::Index>(dim - 1);
    theta = std::max(theta, es.eigenvalues()(top));
    const auto y = es.eigenvectors().col(top);
    // an eigenvalue of a*a lies within `residual` of the Ritz value
    const double residual = invariant ? 0.0 : beta[dim - 1] * std::abs(y(top));
    if (theta <= 0.0) return 0.0;
    if (residual <= tol * theta) return std::sqrt(theta);

    std::fill(x.begin(), x.end(), Complex(0.0));
    for (std::size_t j = 0; j < dim; ++j)
      for (std::size_t i = 0; i < n; ++i) x[i] += y(static_cast<Eigen::Index>(j)) * basis[j][i];
  }
  std::vector<double> last(n);
  for (std::size_t i = 0; i < n; ++i) last[i] = std::abs(x[i]);
  throw ConvergenceError("operator_norm: no convergence after " + std::to_string(max_iter) + " iterations",
                         std::sqrt(theta), std::move(last));
}

double best_k_sparse_column_error(std::span<const Complex> x, std::size_t k) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t p, std::size_t q) { return std::abs(x[p]) > std::abs(x[q]); });
  double rest = 0.0;
  for (std::size_t r = std::min(k, x.size()); r < order.size(); ++r) rest += std::norm(x[order[r]]);
  return std::sqrt(rest);
}

SparseOp embed_block(const SparseOp& a, std::size_t m) {
  if (m == 0) throw ContractViolation("embed_block: m must be positive");
  std::vector<Triplet> t;
  t.reserve(a.nnz() * m);
  for (const auto& e : a.triplets()) {
    for (std::size_t r = 0; r < m; ++r) t.push_back({e.row * m + r, e.col * m + r, e.value});
  }
  return SparseOp::from_triplets(a.window() * m, std::move(t));
}

SparseOp embed_blocks(const std::vector<std::vector<SparseOp>>& blocks) {
  const std::size_t m = blocks.size();
  if (m == 0) throw ContractViolation("embed_blocks: empty block grid");
  const std::size_t n = blocks[0].empty() ? 0 : blocks[0][0].window();
  std::vector<Triplet> t;
  for (std::size_t r = 0; r < m; ++r) {
    if (blocks[r].size() != m) throw DimensionError("embed_blocks: block grid must be square");
    for (std::size_t s = 0; s < m; ++s) {
      if (blocks[r][s].window() != n) throw DimensionError("embed_blocks: blocks must share a window");
      for (const auto& e : blocks[r][s].triplets()) t.push_back({e.row * m + r, e.col * m + s, e.value});
    }
  }
  return SparseOp::from_triplets(n * m, std::move(t));
}

SparseOp truncate_compact(const SparseOp& a, std::size_t r) {
  std::vector<Triplet> t;
  for (const auto& e : a.triplets()) {
    if (e.row < r && e.col < r) t.push_back(e);
  }
  return SparseOp::from_triplets(a.window(), std::move(t));
}

SparseOp prune(const SparseOp& a, double eps) {
  std::vector<Triplet> t;
  for (const auto& e : a.triplets()) {
    if (std::abs(e.value) > eps) t.push_back(e);
  }
  return SparseOp::from_triplets(a.window(), std::move(t));
}

SparseOp compress(const SparseOp& a, std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
  if (rows.size() != cols.size()) throw DimensionError("compress: rows and cols must have equal length");
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> col_pos(a.window(), none);
  for (std::size_t q = 0; q < cols.size(); ++q) {
    require_index(cols[q], a.window(), "column");
    col_pos[cols[q]] = q;
  }
  std::vector<Triplet> t;
  for (std::size_t p = 0; p < rows.size(); ++p) {
    require_index(rows[p], a.window(), "row");
    const auto rc = a.row_cols(rows[p]);
    const auto rv = a.row_values(rows[p]);
    for (std::size_t q = 0; q < rc.size(); ++q) {
      if (col_pos[rc[q]] != none) t.push_back({p, col_pos[rc[q]], rv[q]});
    }
  }
  return SparseOp::from_triplets(rows.size(), std::move(t));
}

SparseOp extend_window(const SparseOp& a, std::size_t window) {
  if (window < a.window()) throw DimensionError("extend_window: cannot shrink a window");
  return SparseOp::from_triplets(window, a.triplets());
}

}  // namespace mfop
