#pragma once

// Explicit truncations of the named operators on H = (+)_n C^n:
// the averaging isometry v, its complement basis, the interleaved unitary u,
// the block projection p = vv*, the 2x2 projection (1 u; u* 1)/2, the shift
// isometries v1/v2 and the polar-decomposition counterexample a = vh.

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "mfop/sparse_op.hpp"

namespace mfop {

class BlockLayout {
 public:
  /// Blocks of sizes 1, 2, ..., count.
  static BlockLayout triangular(std::size_t count);
  explicit BlockLayout(std::vector<std::size_t> sizes);

  std::size_t block_count() const noexcept { return sizes_.size(); }
  std::size_t size(std::size_t block) const { return sizes_.at(block); }
  std::size_t offset(std::size_t block) const { return offsets_.at(block); }
  /// Sum of all block sizes.
  std::size_t total() const noexcept { return offsets_.back(); }
  const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }
  const std::vector<std::size_t>& offsets() const noexcept { return offsets_; }

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;  // block_count() + 1 prefix sums
};

struct BlockDiagOp {
  BlockLayout layout;
  std::vector<Eigen::MatrixXcd> blocks;

  /// Flatten onto a window (defaults to layout.total()). Entries copied exactly.
  SparseOp to_sparse(std::size_t window = 0) const;
};

/// Column n is a_n: block n filled with 1/sqrt(size). Remaining columns are zero.
SparseOp make_averaging_isometry(const BlockLayout& layout, std::size_t window);

/// Helmert basis of the complement of the constants, block by block.
/// Block n contributes size(n)-1 consecutive columns.
SparseOp make_complement_basis(const BlockLayout& layout, std::size_t window);

enum class BoundaryPolicy {
  drop,      ///< columns whose vector is not available in the window are left empty
  complete,  ///< empty slots are filled with the unused complement vectors (exactly unitary)
};

struct UnitaryTruncation {
  SparseOp u;
  std::size_t domain_interior = 0;  ///< leading columns on which u*u = I
  std::size_t range_interior = 0;   ///< leading rows on which uu* = I
  std::size_t dropped_columns = 0;
};

/// u(e_{2n-1}) = a_n, u(e_{2n}) = b_n (1-based), on a window of layout.total().
UnitaryTruncation make_interleaved_unitary(const BlockLayout& layout,
                                           BoundaryPolicy policy = BoundaryPolicy::drop);

/// Block n is the n x n matrix with all entries 1/n.
BlockDiagOp make_block_projection(const BlockLayout& layout);

/// (1 u; u* 1)/2 flattened by embed_blocks. Throws ContractViolation if u is not
/// unitary to within `tol` (max entry of u*u - I and uu* - I).
SparseOp make_m2_projection(const SparseOp& u, double tol = 1e-10);

/// v1(e_n) = e_{2n-1}, v2(e_n) = e_{2n} (1-based), truncated to the window.
std::pair<SparseOp, SparseOp> make_shift_isometries(std::size_t window);

struct PolarCounterexample {
  SparseOp a;  ///< v h
  SparseOp v;
  SparseOp h;  ///< diag(lambda_1, ..., lambda_B)
  std::vector<double> lambdas;
};

/// Default lambdas are 1/n. Throws ContractViolation on non-positive or increasing lambdas.
PolarCounterexample make_polar_counterexample(const BlockLayout& layout, std::vector<double> lambdas = {});

struct ApproximationPoint {
  std::size_t r = 0;
  double error = 0.0;  ///< ||a - truncate_compact(a, r)||
  double bound = 0.0;  ///< lambda of the first column not fully inside [0, r)
};

/// Finite-support approximation curve of the counterexample for r = 1..window.
std::vector<ApproximationPoint> polar_approximation_curve(const PolarCounterexample& pc, const BlockLayout& layout);

/// Recovers v by normalizing the columns of a.
SparseOp normalize_columns(const SparseOp& a);

}  // namespace mfop
