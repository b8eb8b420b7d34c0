#pragma once

// Regular graphs, degree-normalized Laplacians, spectral gaps and the
// Chebyshev filter that turns a Laplacian with a gap into a sparse
// approximation of its kernel projection.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mfop/sparse_op.hpp"

namespace mfop {

/// Uniformly locally finite graph as sorted, symmetric adjacency lists (0-based).
struct UlfGraph {
  std::vector<std::vector<std::size_t>> adjacency;

  std::size_t vertex_count() const noexcept { return adjacency.size(); }
  std::size_t max_degree() const noexcept;
  std::size_t edge_count() const noexcept;
  /// Sorted lists, symmetric, no loops, no repeated neighbours.
  bool is_simple() const;
  bool is_connected() const;
  /// Hop distance from `source` (SIZE_MAX for unreachable vertices).
  std::vector<std::size_t> bfs_distances(std::size_t source) const;
};

struct RegularGraph {
  std::size_t degree = 0;
  UlfGraph graph;

  std::size_t vertex_count() const noexcept { return graph.vertex_count(); }
  /// Throws ContractViolation unless the graph is simple and every vertex has `degree` neighbours.
  static RegularGraph from_graph(UlfGraph g);
};

/// Complete graph K_m.
RegularGraph complete_graph(std::size_t m);

struct RandomGraphOptions {
  std::uint64_t max_attempts = 10'000'000;
};

/// Pairing model with restart on any loop or repeated edge. Deterministic in `seed`.
/// Throws ContractViolation unless d*m is even and d < m; RetryExhausted past the attempt cap.
RegularGraph random_regular_graph(std::size_t m, std::size_t d, std::uint64_t seed, RandomGraphOptions opt = {});

/// Edge list text: one "u v" per line, 1-based, u < v, sorted.
void write_edge_list(std::ostream& os, const UlfGraph& g);
/// Vertex count is max(vertex_count, largest index seen).
UlfGraph read_edge_list(std::istream& is, std::size_t vertex_count = 0);
UlfGraph read_edge_list_file(const std::string& path, std::size_t vertex_count = 0);
void write_edge_list_file(const std::string& path, const UlfGraph& g);

/// L_vv = 1, L_vw = -1/d for adjacent v, w.
SparseOp laplacian(const RegularGraph& g);

struct SpectralGap {
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  bool connected = false;  ///< lambda1 > 1e-10
};

inline constexpr std::size_t kDenseEigenCap = 512;

/// Two smallest eigenvalues by dense symmetric eigensolver (window <= kDenseEigenCap).
SpectralGap spectral_gap(const SparseOp& l);

/// f(x) = sum_j c_j T_j(phi(x)), phi(x) = (2x - delta - 2)/(2 - delta).
/// The scaled Chebyshev filter has the single coefficient c_t = 1/T_t(phi(0)).
struct PolyFilter {
  double delta = 0.0;
  std::size_t s = 1;
  std::vector<double> coeffs;
  std::size_t degree() const noexcept { return coeffs.empty() ? 0 : coeffs.size() - 1; }
  double phi(double x) const noexcept { return (2.0 * x - delta - 2.0) / (2.0 - delta); }
  double operator()(double x) const;
  /// sup of |f| over [delta, 2], which is |c_t|.
  double sup_bound() const noexcept;
};

/// Lowest degree t with 1/|T_t(phi(0))| <= 1/s. Throws ContractViolation unless 0 < delta < 2.
PolyFilter chebyshev_filter(double delta, std::size_t s);

/// Clenshaw recurrence in SparseOp arithmetic.
SparseOp apply_filter(const PolyFilter& f, const SparseOp& l);

struct CornerError {
  double exact = 0.0;
  double bound = 0.0;
};

/// || p_{2n+1} - diag(p_{2n}, 0) || and (2 + 2 sqrt(2n))/(2n + 1).
CornerError corner_compression_error(std::size_t n);

struct ExpanderBlock {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t degree = 0;      ///< < requested d when the block is a complete graph
  std::uint64_t seed = 0;
  std::size_t regenerations = 0;
  double lambda1 = 0.0;
  double laplacian_norm = 0.0;
  double err = 0.0;            ///< || f_s(L_n) - p_m ||
  UlfGraph graph;
};

struct ExpanderReport {
  std::size_t n_max = 0;
  std::size_t d = 0;
  std::size_t s = 0;
  std::uint64_t seed = 0;
  std::vector<ExpanderBlock> blocks;
  double delta_hat = 0.0;      ///< min lambda1 over blocks
  double delta_used = 0.0;     ///< delta_hat clamped below 2
  PolyFilter filter;
  double profile_bound = 0.0;  ///< (d + 1)^t
  SparsityProfile measured_profile;
  double max_err = 0.0;
  double max_laplacian_norm = 0.0;
  std::vector<CornerError> corner;  ///< n = 1..n_max
  SparseOp filtered;           ///< f_s applied to the direct sum of the Laplacians
};

/// Blocks |V_n| = 2n for n = 1..n_max. When 2n <= d the block is K_{2n}.
/// A disconnected block is regenerated with the next derived seed.
ExpanderReport build_even_projection_pipeline(std::size_t n_max, std::size_t d, std::size_t s, std::uint64_t seed);

}  // namespace mfop
