#pragma once

// Dense linear algebra on SparseOp values, backed by Eigen.
//
// Singular values and Hermitian spectra are computed per connected component
// of the row/column incidence graph, so block-diagonal operators (direct sums
// of Laplacians, block projections, paths that act as the identity on most
// indices) never pay for a full N x N factorization.

#include <Eigen/Dense>
#include <vector>

#include "mfop/sparse_op.hpp"

namespace mfop::dense {

Eigen::MatrixXcd to_dense(const SparseOp& a);
/// Exact zeros are dropped; no thresholding.
SparseOp from_dense(const Eigen::MatrixXcd& m);

/// Row/column groups of the bipartite incidence graph; each group is (rows, cols).
struct Component {
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
};
std::vector<Component> components(const SparseOp& a);

/// All window() singular values, descending.
std::vector<double> singular_values(const SparseOp& a);

struct SingularExtremes {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
};
/// Smallest and largest singular value (Gram eigenvalues per component).
SingularExtremes singular_extremes(const SparseOp& a);

/// Spectral norm of a dense matrix (BDCSVD).
double norm(const Eigen::MatrixXcd& m);
double norm(const SparseOp& a);
double sigma_min(const Eigen::MatrixXcd& m);

/// Eigenvalues of a Hermitian operator, ascending. Uses the Hermitian part (a + a*)/2.
std::vector<double> hermitian_eigenvalues(const SparseOp& a);

}  // namespace mfop::dense
