#pragma once

// Matrix-finite operators from coarse data: truncated group actions,
// adjacency operators of ULF graphs and band operators on finite metric spaces.

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mfop/expander.hpp"
#include "mfop/sparse_op.hpp"

namespace mfop {

enum class Boundary { cyclic, drop };

/// Each generator maps point x to generators[m][x], or kNoImage where the
/// truncation has no room for the image. Images are distinct (partial bijections).
struct FiniteAction {
  static constexpr std::size_t kNoImage = static_cast<std::size_t>(-1);

  std::size_t point_count = 0;
  std::vector<std::vector<std::size_t>> generators;

  /// Throws ContractViolation on out-of-range or repeated images.
  void validate() const;
  /// The inverse partial bijection of generator m.
  std::vector<std::size_t> inverse(std::size_t m) const;
  bool is_bijective(std::size_t m) const;
};

/// Z acting on 0..N-1 by x -> x + shift for each listed shift.
FiniteAction integer_shift_action(std::size_t n, const std::vector<long long>& shifts, Boundary boundary = Boundary::cyclic);

/// r uniformly random permutations of 0..N-1, optionally followed by their inverses.
FiniteAction random_permutation_action(std::size_t n, std::size_t r, std::uint64_t seed, bool with_inverses = true);

/// Free group on `rank` generators acting by left multiplication on the reduced
/// words of length <= radius. Generator order: g_1, g_1^{-1}, g_2, g_2^{-1}, ...
/// Words that would leave the ball have no image.
FiniteAction free_group_ball(std::size_t rank, std::size_t radius);

/// sum_m coeffs[m] P_m, P_m e_x = e_{g_m(x)}, then left-multiplied by diag if given.
SparseOp action_operator(const FiniteAction& act, const std::vector<Complex>& coeffs,
                         const std::optional<std::vector<Complex>>& diag = std::nullopt);

/// (a_G)_vw = 1 iff v ~ w.
SparseOp adjacency_operator(const UlfGraph& g);

/// Explicit finite metric with integer distances.
class MetricSpace {
 public:
  static constexpr long long kInfinite = -1;

  explicit MetricSpace(std::size_t n, std::vector<long long> distances, std::vector<long long> witness_radii = {});

  std::size_t point_count() const noexcept { return n_; }
  /// kInfinite for points in different components.
  long long d(std::size_t x, std::size_t y) const { return dist_[x * n_ + y]; }
  /// max over x of #{y : d(x,y) <= r}.
  std::size_t ball_size(long long r) const;
  /// Declared bounded-geometry table: radius -> max ball size.
  const std::map<long long, std::size_t>& witness() const noexcept { return witness_; }

  /// Symmetry and zero diagonal. Throws ContractViolation.
  void validate_basic() const;
  /// Triangle inequality on every triple when n <= exhaustive_limit, otherwise on `samples` random triples.
  bool triangle_inequality_holds(std::uint64_t seed = 0, std::size_t samples = 200000, std::size_t exhaustive_limit = 160) const;

 private:
  std::size_t n_;
  std::vector<long long> dist_;
  std::map<long long, std::size_t> witness_;
};

MetricSpace line_metric(std::size_t n, std::vector<long long> witness_radii = {});
MetricSpace cycle_metric(std::size_t n, std::vector<long long> witness_radii = {});
MetricSpace graph_metric(const UlfGraph& g, std::vector<long long> witness_radii = {});

/// "N" then N lines of N integers (-1 for infinite distance).
MetricSpace read_metric(std::istream& is);
MetricSpace read_metric_file(const std::string& path);
void write_metric(std::ostream& os, const MetricSpace& m);

using Kernel = std::function<Complex(std::size_t, std::size_t)>;

struct BandOperator {
  SparseOp op;
  long long radius = 0;
  std::size_t ball_bound = 0;    ///< max ball size at `radius`
  bool witness_recomputed = false;  ///< radius was not in the declared witness table
};

/// a_xy = kernel(x, y) when d(x, y) <= R, else 0.
BandOperator band_operator(const MetricSpace& space, const Kernel& kernel, long long radius);

/// Largest d(x, y) over stored entries (kInfinite if some entry joins two components).
long long propagation(const SparseOp& a, const MetricSpace& space);

}  // namespace mfop
