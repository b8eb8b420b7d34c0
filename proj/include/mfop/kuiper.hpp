#pragma once

// A certified path of invertible sparse operators from an invertible g to the
// identity, following the selection / rotation / compression steps of the
// contractibility argument on a finite window.
//
// Stages of contract():
//   select     the first step, equal to g
//   rotate1    plane (g a_i, a'_i): g a_i is turned onto |g a_i| a'_i
//   rotate2    plane (a'_i, a_i): |g a_i| a'_i is turned onto |g a_i| a_i
//   normalize  column a_i moves linearly to e_{a_i}
//   compress   the block of rows H' = span{a_i} and columns H1 = H'^perp is scaled to 0,
//              ending at f4 = p' + u with u = p1 f4 p1
//   close      F(t) = p' + (1 - t) u - t e^{i phi} p1, followed by the arc p' + e^{i psi} p1
//              from psi = phi + pi back to 0. The ray avoids the spectrum of u.
//
// Every recorded step carries sigma_min, sigma_max, its profile and the jump
// || F_{j+1} - F_j || / || F_j ||. Intervals are bisected until the jump is at
// most max_jump, and (for at most `retries` extra levels) until
// min(sigma_j, sigma_{j+1}) - || F_{j+1} - F_j || is positive.

#include <functional>
#include <string>
#include <vector>

#include "mfop/sparse_op.hpp"

namespace mfop {

enum class Stage { select, rotate1, rotate2, normalize, compress, close, whitehead };
std::string to_string(Stage s);

struct KuiperConfig {
  std::size_t count = 8;        ///< number of (a_i, a'_i) pairs
  std::size_t steps = 64;       ///< initial uniform steps per stage
  double max_jump = 0.1;
  double sigma_floor = 1e-8;    ///< below this a step is a hard failure
  std::size_t retries = 3;      ///< extra bisection levels spent on a non-positive interval bound
  std::size_t max_depth = 16;   ///< bisection depth cap per initial interval

  /// count (k+2)(k+1) + (k+2): enough room for the greedy scan at profile k.
  std::size_t min_window(std::size_t k) const noexcept { return count * (k + 2) * (k + 1) + (k + 2); }
};

/// Profile budget B(k) = 2k(k+1) + 1 for every step of contract().
std::size_t profile_budget(std::size_t k) noexcept;

struct StepCertificate {
  Stage stage = Stage::select;
  double t = 0.0;               ///< stage parameter in [0, 1]
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  SparsityProfile profile;
  double jump = 0.0;            ///< relative to the previous step; 0 for the first step
  double interval_lower = 0.0;  ///< min sigma over the two ends minus the step norm
};

struct Selection {
  std::vector<std::size_t> a;
  std::vector<std::size_t> aprime;
};

struct HomotopyPath {
  std::vector<SparseOp> steps;
  std::vector<StepCertificate> certs;
  std::size_t profile_budget = 0;  ///< B(k) for contract(); 0 when not applicable
  Selection selection;
  double close_direction = 0.0;    ///< phi of the close stage
  std::size_t refinements = 0;     ///< bisections performed

  std::size_t size() const noexcept { return steps.size(); }
  double min_sigma() const;
  double max_jump() const;
  std::size_t max_profile() const;
  /// [first, last] step indices carrying the stage label.
  std::pair<std::size_t, std::size_t> stage_range(Stage s) const;
  /// Appends `seg` minus its first step, which must coincide with our last one.
  void append(HomotopyPath&& seg);
};

/// Greedy scan in ascending index: a_i avoids the union S of the earlier
/// {a_l, a'_l} and supports of g e_{a_l}, and supp(g e_{a_i}) avoids S too.
/// a'_i is the first index outside S, a_i and supp(g e_{a_i}).
/// Throws WindowTooSmall when the scan runs out.
Selection select_basis_vectors(const SparseOp& g, std::size_t count);

/// Orthogonality conditions of the selection, checked with explicit inner products.
bool verify_selection(const SparseOp& g, const Selection& sel, double tol = 0.0);

/// rotate1 followed by rotate2, starting at g.
HomotopyPath rotation_stage(const SparseOp& g, const Selection& sel, const KuiperConfig& cfg);
/// normalize followed by compress, starting at the end of the rotation stage.
HomotopyPath normalize_and_compress(const SparseOp& f2, const Selection& sel, const KuiperConfig& cfg);
/// Ray and arc from f4 = p' + u to the identity.
HomotopyPath close_stage(const SparseOp& f4, const Selection& sel, const KuiperConfig& cfg);

/// Throws ContractViolation (not invertible enough) or WindowTooSmall; stage failures propagate.
HomotopyPath contract(const SparseOp& g, const KuiperConfig& cfg = {});

struct WhiteheadResult {
  HomotopyPath path;
  SparseOp u_inverse;
  SparsityProfile u_profile;
  SparsityProfile u_inverse_profile;
  double inverse_residual = 0.0;  ///< || u u^{-1} - 1 ||
};

/// Window slices * n, slice s on indices [s n, (s + 1) n). Starts at
/// diag(u, u^{-1}, u, u^{-1}, ...) and ends at the identity through
/// W(theta) = [[c^2 + s^2 u, cs (1 - u)], [cs (u^{-1} - 1), s^2 u^{-1} + c^2]],
/// theta from pi/2 to 0 on every pair of slices. An odd last slice stays the identity.
WhiteheadResult whitehead_stage(const SparseOp& u, std::size_t slices, const KuiperConfig& cfg);

/// Random invertible operator with profile <= (3, 3): a permutation times
/// (D + l1 Q1 + l2 Q2), |D_ii| in [1, 2], Q permutations, |l| <= 0.3.
SparseOp random_invertible(std::size_t window, std::uint64_t seed);

}  // namespace mfop
