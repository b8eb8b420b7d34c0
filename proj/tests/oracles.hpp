#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's own dense helpers, so agreement is a real cross-check.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "mfop/sparse_op.hpp"

namespace oracle {

using mfop::Complex;
using mfop::SparseOp;

inline Eigen::MatrixXcd dense(const SparseOp& a) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(a.window()), static_cast<Eigen::Index>(a.window()));
  for (const auto& t : a.triplets()) m(static_cast<Eigen::Index>(t.row), static_cast<Eigen::Index>(t.col)) = t.value;
  return m;
}

/// Singular values, descending, as the nonnegative eigenvalues of the Hermitian
/// dilation [[0, m], [m*, 0]].
inline Eigen::VectorXd svd(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return Eigen::VectorXd();
  const Eigen::Index r = m.rows(), c = m.cols();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(r + c, r + c);
  h.topRightCorner(r, c) = m;
  h.bottomLeftCorner(c, r) = m.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  const Eigen::Index n = std::min(r, c);
  Eigen::VectorXd s(n);
  for (Eigen::Index i = 0; i < n; ++i) s(i) = std::max(es.eigenvalues()(r + c - 1 - i), 0.0);
  return s;
}

/// Divide-and-conquer SVD for larger matrices, the dilation when it returns non-finite values.
inline Eigen::VectorXd svd_fast(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return Eigen::VectorXd();
  Eigen::BDCSVD<Eigen::MatrixXcd> s(m);
  if (s.singularValues().allFinite()) return s.singularValues();
  return svd(m);
}

inline double norm(const Eigen::MatrixXcd& m) {
  const auto s = svd(m);
  return s.size() == 0 ? 0.0 : s(0);
}
inline double norm(const SparseOp& a) { return norm(dense(a)); }

inline double sigma_min(const Eigen::MatrixXcd& m) {
  const auto s = svd(m);
  return s.size() == 0 ? 0.0 : s(s.size() - 1);
}
inline double sigma_min(const SparseOp& a) { return sigma_min(dense(a)); }

inline double max_abs(const Eigen::MatrixXcd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// (max nonzeros per row, max per column) counted on a dense matrix.
inline mfop::SparsityProfile profile(const Eigen::MatrixXcd& m) {
  mfop::SparsityProfile p;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::size_t r = 0, c = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      r += m(i, j) != Complex(0.0);
      c += m(j, i) != Complex(0.0);
    }
    p.row_max = std::max(p.row_max, r);
    p.col_max = std::max(p.col_max, c);
  }
  return p;
}

/// min over all supports S with |S| <= k of ||x - x_S||, by enumeration.
inline double best_k_error_brute(const std::vector<Complex>& x, std::size_t k) {
  const std::size_t n = x.size();
  if (k >= n) return 0.0;
  double total = 0.0;
  for (const auto& v : x) total += std::norm(v);
  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> mask(n, false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(k), true);
  do {
    double kept = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask[i]) kept += std::norm(x[i]);
    best = std::min(best, total - kept);
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return std::sqrt(std::max(best, 0.0));
}

/// Chebyshev T_t(x) by the three-term recurrence.
inline double chebyshev_t(std::size_t t, double x) {
  if (t == 0) return 1.0;
  double a = 1.0, b = x;
  for (std::size_t j = 1; j < t; ++j) {
    const double c = 2.0 * x * b - a;
    a = b;
    b = c;
  }
  return b;
}

/// b(t): least m with m(m+1)/2 >= t.
inline std::size_t triangular_block(std::size_t t) {
  std::size_t m = 1;
  while (m * (m + 1) / 2 < t) ++m;
  return m;
}

inline double path_graph_norm(std::size_t n) {
  return 2.0 * std::cos(std::numbers::pi / static_cast<double>(n + 1));
}

}  // namespace oracle
