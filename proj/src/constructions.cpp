#include "mfop/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfop/error.hpp"

namespace mfop {

BlockLayout BlockLayout::triangular(std::size_t count) {
  std::vector<std::size_t> sizes(count);
  for (std::size_t n = 0; n < count; ++n) sizes[n] = n + 1;
  return BlockLayout(std::move(sizes));
}

BlockLayout::BlockLayout(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)), offsets_(sizes_.size() + 1, 0) {
  for (std::size_t n = 0; n < sizes_.size(); ++n) {
    if (sizes_[n] == 0) throw ContractViolation("BlockLayout: block sizes must be positive");
    offsets_[n + 1] = offsets_[n] + sizes_[n];
  }
}

SparseOp BlockDiagOp::to_sparse(std::size_t window) const {
  if (window == 0) window = layout.total();
  if (window < layout.total()) throw DimensionError("BlockDiagOp: window smaller than layout");
  if (blocks.size() != layout.block_count()) throw DimensionError("BlockDiagOp: block count mismatch");
  std::vector<Triplet> t;
  for (std::size_t n = 0; n < blocks.size(); ++n) {
    const auto m = layout.size(n);
    const auto off = layout.offset(n);
    if (static_cast<std::size_t>(blocks[n].rows()) != m || static_cast<std::size_t>(blocks[n].cols()) != m)
      throw DimensionError("BlockDiagOp: block " + std::to_string(n + 1) + " has wrong shape");
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        const Complex z = blocks[n](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (z != Complex(0.0, 0.0)) t.push_back({off + i, off + j, z});
      }
  }
  return SparseOp::from_triplets(window, std::move(t));
}

SparseOp make_averaging_isometry(const BlockLayout& layout, std::size_t window) {
  if (window < layout.total()) throw DimensionError("averaging isometry: window smaller than layout");
  std::vector<Triplet> t;
  t.reserve(layout.total());
  for (std::size_t n = 0; n < layout.block_count(); ++n) {
    const double x = 1.0 / std::sqrt(static_cast<double>(layout.size(n)));
    for (std::size_t i = 0; i < layout.size(n); ++i) t.push_back({layout.offset(n) + i, n, x});
  }
  return SparseOp::from_triplets(window, std::move(t));
}

namespace {

// Helmert vector j (1 <= j < m) of a block of size m at offset `off`:
// j entries 1/sqrt(j(j+1)) followed by -j/sqrt(j(j+1)).
void push_helmert(std::vector<Triplet>& t, std::size_t off, std::size_t j, std::size_t col) {
  const double s = 1.0 / std::sqrt(static_cast<double>(j) * static_cast<double>(j + 1));
  for (std::size_t i = 0; i < j; ++i) t.push_back({off + i, col, s});
  t.push_back({off + j, col, -static_cast<double>(j) * s});
}

struct HelmertRef {
  std::size_t block;
  std::size_t j;
};

std::vector<HelmertRef> helmert_order(const BlockLayout& layout) {
  std::vector<HelmertRef> refs;
  for (std::size_t n = 0; n < layout.block_count(); ++n)
    for (std::size_t j = 1; j < layout.size(n); ++j) refs.push_back({n, j});
  return refs;
}

}  // namespace

SparseOp make_complement_basis(const BlockLayout& layout, std::size_t window) {
  if (window < layout.total()) throw DimensionError("complement basis: window smaller than layout");
  std::vector<Triplet> t;
  std::size_t col = 0;
  for (const auto& h : helmert_order(layout)) push_helmert(t, layout.offset(h.block), h.j, col++);
  return SparseOp::from_triplets(window, std::move(t));
}

UnitaryTruncation make_interleaved_unitary(const BlockLayout& layout, BoundaryPolicy policy) {
  const std::size_t n = layout.total();
  const std::size_t blocks = layout.block_count();
  const auto refs = helmert_order(layout);

  std::vector<Triplet> t;
  std::vector<bool> a_used(blocks, false);
  std::vector<bool> filled(n, false);
  std::size_t next_b = 0;
  for (std::size_t c = 0; c < n; ++c) {
    if (c % 2 == 0) {
      const std::size_t blk = c / 2;
      if (blk < blocks) {
        const double x = 1.0 / std::sqrt(static_cast<double>(layout.size(blk)));
        for (std::size_t i = 0; i < layout.size(blk); ++i) t.push_back({layout.offset(blk) + i, c, x});
        a_used[blk] = true;
        filled[c] = true;
      }
    } else if (next_b < refs.size()) {
      push_helmert(t, layout.offset(refs[next_b].block), refs[next_b].j, c);
      ++next_b;
      filled[c] = true;
    }
  }
  if (policy == BoundaryPolicy::complete) {
    for (std::size_t c = 0; c < n && next_b < refs.size(); ++c) {
      if (filled[c]) continue;
      push_helmert(t, layout.offset(refs[next_b].block), refs[next_b].j, c);
      ++next_b;
      filled[c] = true;
    }
  }

  UnitaryTruncation out;
  out.u = SparseOp::from_triplets(n, std::move(t));
  out.domain_interior = n;
  for (std::size_t c = 0; c < n; ++c) {
    if (!filled[c]) {
      if (out.domain_interior == n) out.domain_interior = c;
      ++out.dropped_columns;
    }
  }
  // A block is spanned once its constant vector and all of its Helmert
  // vectors are columns of u. Helmert vectors are consumed in block order.
  std::vector<std::size_t> b_used(blocks, 0);
  for (std::size_t r = 0; r < next_b; ++r) ++b_used[refs[r].block];
  out.range_interior = n;
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    if (!a_used[blk] || b_used[blk] + 1 != layout.size(blk)) {
      out.range_interior = layout.offset(blk);
      break;
    }
  }
  return out;
}

BlockDiagOp make_block_projection(const BlockLayout& layout) {
  BlockDiagOp p{layout, {}};
  p.blocks.reserve(layout.block_count());
  for (std::size_t n = 0; n < layout.block_count(); ++n) {
    const auto m = static_cast<Eigen::Index>(layout.size(n));
    p.blocks.push_back(Eigen::MatrixXcd::Constant(m, m, Complex(1.0 / static_cast<double>(m), 0.0)));
  }
  return p;
}

SparseOp make_m2_projection(const SparseOp& u, double tol) {
  const auto id = SparseOp::identity(u.window());
  const auto ua = adjoint(u);
  const double left = max_entry_distance(ua * u, id);
  const double right = max_entry_distance(u * ua, id);
  if (left > tol || right > tol)
    throw ContractViolation("m2 projection: u is not unitary (max |u*u - 1| = " + std::to_string(left) +
                            ", max |uu* - 1| = " + std::to_string(right) + ")");
  const Complex h(0.5, 0.0);
  return embed_blocks({{scale(id, h), scale(u, h)}, {scale(ua, h), scale(id, h)}});
}

std::pair<SparseOp, SparseOp> make_shift_isometries(std::size_t window) {
  std::vector<Triplet> t1, t2;
  for (std::size_t j = 0; 2 * j < window; ++j) t1.push_back({2 * j, j, 1.0});
  for (std::size_t j = 0; 2 * j + 1 < window; ++j) t2.push_back({2 * j + 1, j, 1.0});
  return {SparseOp::from_triplets(window, std::move(t1)), SparseOp::from_triplets(window, std::move(t2))};
}

PolarCounterexample make_polar_counterexample(const BlockLayout& layout, std::vector<double> lambdas) {
  const std::size_t n = layout.total();
  if (lambdas.empty()) {
    lambdas.resize(n);
    for (std::size_t i = 0; i < n; ++i) lambdas[i] = 1.0 / static_cast<double>(i + 1);
  }
  if (lambdas.size() < n)
    throw ContractViolation("polar counterexample: need " + std::to_string(n) + " lambdas, got " +
                            std::to_string(lambdas.size()));
  lambdas.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lambdas[i] > 0.0)) throw ContractViolation("polar counterexample: lambda must be positive");
    if (i > 0 && lambdas[i] > lambdas[i - 1]) throw ContractViolation("polar counterexample: lambdas must decrease");
  }
  PolarCounterexample pc;
  pc.v = make_averaging_isometry(layout, n);
  std::vector<Complex> d(lambdas.begin(), lambdas.end());
  pc.h = SparseOp::diagonal(d);
  pc.a = pc.v * pc.h;
  pc.lambdas = std::move(lambdas);
  return pc;
}

std::vector<ApproximationPoint> polar_approximation_curve(const PolarCounterexample& pc, const BlockLayout& layout) {
  const std::size_t n = pc.a.window();
  std::vector<ApproximationPoint> curve;
  curve.reserve(n);
  // Columns of a have disjoint row supports, so a - trunc(a, r) has
  // orthogonal columns and its norm is the largest residual column norm.
  for (std::size_t r = 1; r <= n; ++r) {
    ApproximationPoint pt{r, 0.0, 0.0};
    bool bound_set = false;
    for (std::size_t c = 0; c < layout.block_count(); ++c) {
      const double size = static_cast<double>(layout.size(c));
      const std::size_t lo = layout.offset(c), hi = layout.offset(c + 1);
      std::size_t outside = c >= r ? layout.size(c) : (hi > r ? hi - std::max(lo, r) : 0);
      if (outside == 0) continue;
      pt.error = std::max(pt.error, pc.lambdas[c] * std::sqrt(static_cast<double>(outside) / size));
      if (!bound_set) {
        pt.bound = pc.lambdas[c];
        bound_set = true;
      }
    }
    curve.push_back(pt);
  }
  return curve;
}

SparseOp normalize_columns(const SparseOp& a) {
  std::vector<double> norms(a.window(), 0.0);
  for (std::size_t j = 0; j < a.window(); ++j)
    for (const auto& z : a.col_values(j)) norms[j] += std::norm(z);
  auto t = a.triplets();
  for (auto& e : t) e.value /= std::sqrt(norms[e.col]);
  return SparseOp::from_triplets(a.window(), std::move(t));
}

}  // namespace mfop
