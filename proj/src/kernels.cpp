#include "mfop/kernels.hpp"

#include <algorithm>
#include <cstdint>

#include "mfop/error.hpp"

#ifdef MFOP_HAVE_OPENMP
#include <omp.h>
#endif

namespace mfop::kernels {

namespace {

void check_spmv(const SparseOp& a, std::span<const Complex> x, std::span<Complex> y) {
  if (x.size() != a.window() || y.size() != a.window()) throw DimensionError("spmv: vector length != window");
}

// One output row of a*b. `acc`/`mark` are a dense scatter workspace owned by the caller.
void gustavson_row(const SparseOp& a, const SparseOp& b, std::size_t i, std::vector<Complex>& acc,
                   std::vector<std::size_t>& mark, std::vector<std::size_t>& touched,
                   std::vector<std::size_t>& out_cols, std::vector<Complex>& out_vals) {
  touched.clear();
  const auto ac = a.row_cols(i);
  const auto av = a.row_values(i);
  for (std::size_t p = 0; p < ac.size(); ++p) {
    const auto bc = b.row_cols(ac[p]);
    const auto bv = b.row_values(ac[p]);
    for (std::size_t q = 0; q < bc.size(); ++q) {
      const std::size_t l = bc[q];
      if (mark[l] != i) {
        mark[l] = i;
        acc[l] = Complex{};
        touched.push_back(l);
      }
      acc[l] += av[p] * bv[q];
    }
  }
  std::sort(touched.begin(), touched.end());
  out_cols.clear();
  out_vals.clear();
  for (std::size_t l : touched) {
    if (acc[l] != Complex(0.0, 0.0)) {
      out_cols.push_back(l);
      out_vals.push_back(acc[l]);
    }
  }
}

constexpr std::size_t kUnmarked = static_cast<std::size_t>(-1);

}  // namespace

void spmv_serial(const SparseOp& a, std::span<const Complex> x, std::span<Complex> y) {
  check_spmv(a, x, y);
  const auto& rp = a.row_ptr();
  const auto& ci = a.col_idx();
  const auto& v = a.values();
  for (std::size_t i = 0; i < a.window(); ++i) {
    Complex s{};
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) s += v[p] * x[ci[p]];
    y[i] = s;
  }
}

void spmv_omp(const SparseOp& a, std::span<const Complex> x, std::span<Complex> y) {
  check_spmv(a, x, y);
  const auto& rp = a.row_ptr();
  const auto& ci = a.col_idx();
  const auto& v = a.values();
  const auto n = static_cast<std::int64_t>(a.window());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    Complex s{};
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) s += v[p] * x[ci[p]];
    y[i] = s;
  }
}

void spmv_adjoint_serial(const SparseOp& a, std::span<const Complex> x, std::span<Complex> y) {
  check_spmv(a, x, y);
  const auto& cp = a.col_ptr();
  const auto& ri = a.row_idx();
  const auto& v = a.col_values_flat();
  for (std::size_t j = 0; j < a.window(); ++j) {
    Complex s{};
    for (std::size_t p = cp[j]; p < cp[j + 1]; ++p) s += std::conj(v[p]) * x[ri[p]];
    y[j] = s;
  }
}

void spmv_adjoint_omp(const SparseOp& a, std::span<const Complex> x, std::span<Complex> y) {
  check_spmv(a, x, y);
  const auto& cp = a.col_ptr();
  const auto& ri = a.row_idx();
  const auto& v = a.col_values_flat();
  const auto n = static_cast<std::int64_t>(a.window());
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < n; ++j) {
    Complex s{};
    for (std::size_t p = cp[j]; p < cp[j + 1]; ++p) s += std::conj(v[p]) * x[ri[p]];
    y[j] = s;
  }
}

SparseOp spmm_serial(const SparseOp& a, const SparseOp& b) {
  if (a.window() != b.window()) throw DimensionError("spmm: window mismatch");
  const std::size_t n = a.window();
  std::vector<Complex> acc(n);
  std::vector<std::size_t> mark(n, kUnmarked), touched, rc;
  std::vector<Complex> rv;
  std::vector<std::size_t> row_ptr(n + 1, 0), cols;
  std::vector<Complex> vals;
  for (std::size_t i = 0; i < n; ++i) {
    gustavson_row(a, b, i, acc, mark, touched, rc, rv);
    cols.insert(cols.end(), rc.begin(), rc.end());
    vals.insert(vals.end(), rv.begin(), rv.end());
    row_ptr[i + 1] = cols.size();
  }
  return SparseOp::from_csr(n, std::move(row_ptr), std::move(cols), std::move(vals));
}

SparseOp spmm_omp(const SparseOp& a, const SparseOp& b) {
#ifndef MFOP_HAVE_OPENMP
  return spmm_serial(a, b);
#else
  if (a.window() != b.window()) throw DimensionError("spmm: window mismatch");
  const std::size_t n = a.window();
  std::vector<std::vector<std::size_t>> row_cols(n);
  std::vector<std::vector<Complex>> row_vals(n);
#pragma omp parallel
  {
    std::vector<Complex> acc(n);
    std::vector<std::size_t> mark(n, kUnmarked), touched;
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
      const auto row = static_cast<std::size_t>(i);
      gustavson_row(a, b, row, acc, mark, touched, row_cols[row], row_vals[row]);
    }
  }
  std::vector<std::size_t> row_ptr(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) row_ptr[i + 1] = row_ptr[i] + row_cols[i].size();
  std::vector<std::size_t> cols(row_ptr[n]);
  std::vector<Complex> vals(row_ptr[n]);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    const auto row = static_cast<std::size_t>(i);
    std::copy(row_cols[row].begin(), row_cols[row].end(), cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[row]));
    std::copy(row_vals[row].begin(), row_vals[row].end(), vals.begin() + static_cast<std::ptrdiff_t>(row_ptr[row]));
  }
  return SparseOp::from_csr(n, std::move(row_ptr), std::move(cols), std::move(vals));
#endif
}

bool openmp_enabled() noexcept {
#ifdef MFOP_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() noexcept {
#ifdef MFOP_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace mfop::kernels
