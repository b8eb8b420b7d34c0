#pragma once

// Data-parallel inner loops over SparseOp storage.
//
// Every kernel has a serial reference and an OpenMP variant. The OpenMP
// variants partition rows (or columns, for the adjoint) across threads and
// accumulate each output element in the same order as the serial code, so
// results are bitwise identical. Tests compare the two; the benchmark times
// them. Without OpenMP the *_omp functions fall back to the serial ones.

#include <span>

#include "mfop/sparse_op.hpp"

namespace mfop::kernels {

/// y = a x
void spmv_serial(const SparseOp& a, std::span<const Complex> x, std::span<Complex> y);
void spmv_omp(const SparseOp& a, std::span<const Complex> x, std::span<Complex> y);

/// y = a* x
void spmv_adjoint_serial(const SparseOp& a, std::span<const Complex> x, std::span<Complex> y);
void spmv_adjoint_omp(const SparseOp& a, std::span<const Complex> x, std::span<Complex> y);

/// Row-by-row Gustavson product with exact-zero pruning.
SparseOp spmm_serial(const SparseOp& a, const SparseOp& b);
SparseOp spmm_omp(const SparseOp& a, const SparseOp& b);

/// Window size from which mul()/operator_norm() switch to the OpenMP kernels.
inline constexpr std::size_t kParallelThreshold = 512;

bool openmp_enabled() noexcept;
int max_threads() noexcept;

}  // namespace mfop::kernels
